//! Experiment settings and their TOML configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::catalog::Scenario;
use super::units::{paper_config, Scale};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Unit of rate-valued metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    /// Spectral efficiency, bit/s/Hz.
    #[default]
    Se,
    /// Mbit/s over the 20 MHz band with the data-phase duty cycle.
    Mbps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub seed: u64,
    pub realizations: usize,
    pub scale: Scale,
    pub unit: Unit,
    /// Sweep values; the scenario default when `None`.
    pub sweep: Option<Vec<f64>>,
    /// Channel scenarios `T` per SAA problem.
    pub saa_scenarios: usize,
    /// Simpson intervals for distance expectations.
    pub grid: usize,
    /// Greedy step of the secrecy attacks.
    pub delta: f64,
    /// Grid-point budget of the exhaustive secrecy search.
    pub p4_points: u64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_SAA_SCENARIOS: usize = 200;
pub const DEFAULT_P4_POINTS: u64 = 200_000;

impl ExperimentSpec {
    pub fn new(scenario: Scenario, scale: Scale) -> Self {
        Self {
            scenario,
            seed: DEFAULT_SEED,
            realizations: scale.realizations(),
            scale,
            unit: Unit::Se,
            sweep: None,
            saa_scenarios: DEFAULT_SAA_SCENARIOS,
            grid: crate::attack::DEFAULT_GRID,
            delta: crate::secrecy::DEFAULT_DELTA,
            p4_points: DEFAULT_P4_POINTS,
            out: None,
        }
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| self.scenario.default_sweep())
    }

    /// Base system parameters for this spec.
    pub fn system(&self) -> SystemConfig {
        paper_config(self.scale)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        let sweep = self.sweep_values();
        if sweep.is_empty() {
            return bad("sweep range is empty".into());
        }
        let var = self.scenario.sweep_var();
        for &v in &sweep {
            if !v.is_finite() {
                return bad(format!("sweep value {v} is not finite"));
            }
            if var.is_integer() && (v < 1.0 || v.fract() != 0.0) {
                return bad(format!("{} must be a positive integer, got {v}", var.name()));
            }
            match var {
                super::catalog::SweepVar::AttackerRadius if v < self.system().d_min => {
                    return bad(format!("attacker radius {v} is below d_min"));
                }
                super::catalog::SweepVar::Epsilon if !(v > 0.0 && v <= 1.0) => {
                    return bad(format!("epsilon must lie in (0, 1], got {v}"));
                }
                _ => {}
            }
        }
        if self.saa_scenarios == 0 {
            return bad("saa_scenarios must be at least 1".into());
        }
        if self.grid < 8 || self.grid % 2 != 0 {
            return bad(format!("grid must be even and at least 8, got {}", self.grid));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.p4_points == 0 {
            return bad("p4_points must be positive".into());
        }
        self.system().validate()
    }
}

/// On-disk form of an experiment; every field is optional and command-line
/// flags override whatever is set here.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub scale: Option<Scale>,
    pub unit: Option<Unit>,
    pub sweep: Option<Vec<f64>>,
    pub saa_scenarios: Option<usize>,
    pub grid: Option<usize>,
    pub delta: Option<f64>,
    pub p4_points: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Spec for `scenario` (or the file's scenario) with the file's values
    /// applied over the defaults of the chosen scale.
    pub fn to_spec(&self, scenario: Option<Scenario>) -> Result<ExperimentSpec> {
        let scenario = match (scenario, &self.scenario) {
            (Some(s), _) => s,
            (None, Some(id)) => id.parse()?,
            (None, None) => return Err(Error::InvalidConfig("no scenario given".into())),
        };
        let mut spec = ExperimentSpec::new(scenario, self.scale.unwrap_or_default());
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.realizations {
            spec.realizations = v;
        }
        if let Some(v) = self.unit {
            spec.unit = v;
        }
        if let Some(v) = &self.sweep {
            spec.sweep = Some(v.clone());
        }
        if let Some(v) = self.saa_scenarios {
            spec.saa_scenarios = v;
        }
        if let Some(v) = self.grid {
            spec.grid = v;
        }
        if let Some(v) = self.delta {
            spec.delta = v;
        }
        if let Some(v) = self.p4_points {
            spec.p4_points = v;
        }
        if let Some(v) = &self.out {
            spec.out = Some(v.clone());
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override_defaults() {
        let cfg = ConfigFile::parse(
            "scenario = \"fig4b\"\nseed = 9\nrealizations = 12\nscale = \"paper\"\nunit = \"mbps\"\nsweep = [250.0]\n",
        )
        .unwrap();
        let spec = cfg.to_spec(None).unwrap();
        assert_eq!(spec.scenario, Scenario::Fig4b);
        assert_eq!((spec.seed, spec.realizations), (9, 12));
        assert_eq!(spec.scale, Scale::Paper);
        assert_eq!(spec.unit, Unit::Mbps);
        assert_eq!(spec.sweep_values(), vec![250.0]);
        spec.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_scenarios_are_rejected() {
        assert!(ConfigFile::parse("seeed = 1").is_err());
        let cfg = ConfigFile::parse("scenario = \"fig9\"").unwrap();
        assert!(matches!(cfg.to_spec(None), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn invalid_specs_fail_validation() {
        let mut spec = ExperimentSpec::new(Scenario::Fig4a, Scale::Desk);
        spec.realizations = 0;
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::new(Scenario::Fig4a, Scale::Desk);
        spec.sweep = Some(vec![64.5]);
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::new(Scenario::Fig4i, Scale::Desk);
        spec.sweep = Some(vec![]);
        assert!(spec.validate().is_err());
        spec.sweep = Some(vec![1.5]);
        assert!(spec.validate().is_err());
    }
}
