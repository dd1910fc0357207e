//! Physical-unit conversion and the reference system setup. Core modules
//! only ever see linear, noise-normalized powers.

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;

/// Receiver noise floor over the 20 MHz band.
pub const NOISE_FLOOR_DBM: f64 = -101.0;

/// Noise-normalized linear power of a level given in dBm.
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf((dbm - NOISE_FLOOR_DBM) / 10.0)
}

pub fn linear_to_dbm(linear: f64) -> f64 {
    10.0 * linear.log10() + NOISE_FLOOR_DBM
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// `M = 256`, 500 realizations.
    #[default]
    Desk,
    /// `M = 1000`, 10^5 realizations.
    Paper,
}

impl Scale {
    pub fn antennas(self) -> usize {
        match self {
            Scale::Desk => 256,
            Scale::Paper => 1000,
        }
    }

    pub fn realizations(self) -> usize {
        match self {
            Scale::Desk => 500,
            Scale::Paper => 100_000,
        }
    }
}

pub const BS_POWER_DBM: f64 = 46.0;
pub const PILOT_POWER_DBM: f64 = 20.0;
pub const ATTACKER_POWER_DBM: f64 = 30.0;

/// Reference setup: 10 users on a 10-750 m annulus, 46/20/30 dBm at
/// BS/users/attacker, 20 MHz, equal pilot and data phases, `L = K`.
pub fn paper_config(scale: Scale) -> SystemConfig {
    let users = 10;
    SystemConfig {
        antennas: scale.antennas(),
        users,
        pilot_len: users,
        path_loss_exp: 3.522,
        path_loss_const: 3.0682e-5,
        bs_power: dbm_to_linear(BS_POWER_DBM),
        pilot_power: vec![dbm_to_linear(PILOT_POWER_DBM); users],
        attacker_power: dbm_to_linear(ATTACKER_POWER_DBM),
        d_min: 10.0,
        d_max: 750.0,
        d_max_attacker: 750.0,
        bandwidth_hz: 20e6,
        t_pilot: 1.0,
        t_data: 1.0,
    }
}
