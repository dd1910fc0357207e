//! Closed catalog of experiment scenarios and scheme labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "fig4a")]
    Fig4a,
    #[serde(rename = "fig4b")]
    Fig4b,
    #[serde(rename = "fig4c")]
    Fig4c,
    #[serde(rename = "fig4d")]
    Fig4d,
    #[serde(rename = "fig4e")]
    Fig4e,
    #[serde(rename = "fig4f")]
    Fig4f,
    #[serde(rename = "fig4g")]
    Fig4g,
    #[serde(rename = "fig4h")]
    Fig4h,
    #[serde(rename = "fig4i")]
    Fig4i,
}

/// Quantity varied along a scenario's x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// BS antennas `M`.
    Antennas,
    /// Outer radius of the attacker annulus (meters).
    AttackerRadius,
    /// Pilot length `L`.
    PilotLen,
    /// Attacker jamming antennas `N`.
    JamAntennas,
    /// Chance-constraint level.
    Epsilon,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Antennas => "M",
            SweepVar::AttackerRadius => "D_maxJ",
            SweepVar::PilotLen => "L",
            SweepVar::JamAntennas => "N",
            SweepVar::Epsilon => "epsilon",
        }
    }

    /// Whether sweep values must be positive integers.
    pub fn is_integer(self) -> bool {
        matches!(self, SweepVar::Antennas | SweepVar::PilotLen | SweepVar::JamAntennas)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    NoPc,
    SingleUserPc,
    PcUnc,
    PcPi,
    OptimalPcPi,
    Hybrid,
    DataJam,
    PcSecP4,
    PcSecP5,
    /// Chance-constrained secrecy attack with the given user count.
    Chance(usize),
}

impl Scheme {
    pub fn label(self) -> String {
        match self {
            Scheme::NoPc => "noPC".into(),
            Scheme::SingleUserPc => "singleUserPC".into(),
            Scheme::PcUnc => "PC-unc".into(),
            Scheme::PcPi => "PC-pi".into(),
            Scheme::OptimalPcPi => "optimalPC-pi".into(),
            Scheme::Hybrid => "hybrid".into(),
            Scheme::DataJam => "dataJam".into(),
            Scheme::PcSecP4 => "PC-Sec-P4".into(),
            Scheme::PcSecP5 => "PC-Sec-P5".into(),
            Scheme::Chance(k) => format!("chance-K{k}"),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Fig4a,
        Scenario::Fig4b,
        Scenario::Fig4c,
        Scenario::Fig4d,
        Scenario::Fig4e,
        Scenario::Fig4f,
        Scenario::Fig4g,
        Scenario::Fig4h,
        Scenario::Fig4i,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::Fig4a => "fig4a",
            Scenario::Fig4b => "fig4b",
            Scenario::Fig4c => "fig4c",
            Scenario::Fig4d => "fig4d",
            Scenario::Fig4e => "fig4e",
            Scenario::Fig4f => "fig4f",
            Scenario::Fig4g => "fig4g",
            Scenario::Fig4h => "fig4h",
            Scenario::Fig4i => "fig4i",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::Fig4a => "sum-rate vs M, uniform BS power and uniform attack: exact Monte Carlo and large-M",
            Scenario::Fig4b => "sum-rate vs attacker radius for every PC scheme, plus EVPI",
            Scenario::Fig4c => "Jain fairness vs attacker radius",
            Scenario::Fig4d => "sum-rate vs pilot length at D_maxJ = 250 m",
            Scenario::Fig4e => "hybrid vs pilot-only vs data-only attack vs attacker antennas",
            Scenario::Fig4f => "largest individual secrecy rate vs attacker radius",
            Scenario::Fig4g => "CDF of per-user downlink rates at D_maxJ = 250 m",
            Scenario::Fig4h => "CDF of individual secrecy rates at D_maxJ = 325 m",
            Scenario::Fig4i => "chance-constrained secrecy threshold vs epsilon, K = 10 and K = 20",
        }
    }

    pub fn sweep_var(self) -> SweepVar {
        match self {
            Scenario::Fig4a => SweepVar::Antennas,
            Scenario::Fig4b | Scenario::Fig4c | Scenario::Fig4f | Scenario::Fig4g | Scenario::Fig4h => {
                SweepVar::AttackerRadius
            }
            Scenario::Fig4d => SweepVar::PilotLen,
            Scenario::Fig4e => SweepVar::JamAntennas,
            Scenario::Fig4i => SweepVar::Epsilon,
        }
    }

    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            Scenario::Fig4a => vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            Scenario::Fig4b | Scenario::Fig4c | Scenario::Fig4f => {
                vec![100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 750.0]
            }
            Scenario::Fig4d => vec![10.0, 20.0, 30.0, 40.0, 50.0],
            Scenario::Fig4e => vec![1.0, 2.0, 3.0, 4.0],
            Scenario::Fig4g => vec![250.0],
            Scenario::Fig4h => vec![325.0],
            Scenario::Fig4i => vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        }
    }

    pub fn schemes(self) -> Vec<Scheme> {
        use Scheme::*;
        match self {
            Scenario::Fig4a => vec![NoPc, PcUnc],
            Scenario::Fig4b | Scenario::Fig4c | Scenario::Fig4d | Scenario::Fig4g => {
                vec![NoPc, SingleUserPc, PcUnc, PcPi, OptimalPcPi]
            }
            Scenario::Fig4e => vec![PcPi, Hybrid, DataJam],
            Scenario::Fig4f => vec![NoPc, PcSecP4, PcSecP5],
            Scenario::Fig4h => vec![NoPc, PcSecP5],
            Scenario::Fig4i => vec![Chance(10), Chance(20)],
        }
    }

    /// Whether the scenario produces per-user samples for CDF output.
    pub fn is_cdf(self) -> bool {
        matches!(self, Scenario::Fig4g | Scenario::Fig4h)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}
