//! Optimal pilot-contamination attacks on massive-MIMO downlinks: channel
//! and rate models, attacker/BS optimization, secrecy-oriented attacks,
//! hybrid pilot-plus-data jamming and a Monte Carlo experiment harness.

pub mod attack;
pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod hybrid;
pub mod optim;
pub mod quadrature;
pub mod rates;
pub mod rng;
pub mod secrecy;
pub mod stats;

pub use channel::{AttackVector, LargeScale, Topology};
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use rates::PowerAllocation;
