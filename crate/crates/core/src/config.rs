//! System-wide constants for a single-cell massive MIMO downlink.
//!
//! All powers are linear and normalized to the receiver noise power, so a
//! unit-variance AWGN term appears as a literal `1` in every SINR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of BS antennas `M`.
    pub antennas: usize,
    /// Number of single-antenna users `K`.
    pub users: usize,
    /// Pilot length `L` in symbols.
    pub pilot_len: usize,
    /// Path-loss exponent.
    pub path_loss_exp: f64,
    /// Path-loss constant `A` in `theta = A d^-gamma`.
    pub path_loss_const: f64,
    /// BS sum-power budget for downlink data.
    pub bs_power: f64,
    /// Per-user uplink pilot power (one entry per user).
    pub pilot_power: Vec<f64>,
    /// Average attacker power. Zero means no attacker.
    pub attacker_power: f64,
    /// Inner radius of the user and attacker annuli (meters).
    pub d_min: f64,
    /// Outer radius of the user annulus (meters).
    pub d_max: f64,
    /// Outer radius of the attacker annulus (meters).
    pub d_max_attacker: f64,
    pub bandwidth_hz: f64,
    /// Pilot phase duration.
    pub t_pilot: f64,
    /// Data phase duration.
    pub t_data: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.antennas == 0 {
            return bad("antenna count must be at least 1".into());
        }
        if self.users == 0 {
            return bad("user count must be at least 1".into());
        }
        if self.pilot_len == 0 {
            return bad("pilot length must be at least 1".into());
        }
        if self.pilot_power.len() != self.users {
            return bad(format!(
                "expected {} pilot powers, got {}",
                self.users,
                self.pilot_power.len()
            ));
        }
        if !(self.path_loss_exp.is_finite() && self.path_loss_exp > 0.0) {
            return bad("path-loss exponent must be positive".into());
        }
        if !(self.path_loss_const.is_finite() && self.path_loss_const > 0.0) {
            return bad("path-loss constant must be positive".into());
        }
        if !(self.bs_power.is_finite() && self.bs_power > 0.0) {
            return bad("BS power must be positive".into());
        }
        if let Some(p) = self
            .pilot_power
            .iter()
            .find(|p| !(p.is_finite() && **p > 0.0))
        {
            return bad(format!("pilot power must be positive, got {p}"));
        }
        if !(self.attacker_power.is_finite() && self.attacker_power >= 0.0) {
            return bad("attacker power must be non-negative".into());
        }
        if !(self.d_min > 0.0 && self.d_min <= self.d_max) {
            return bad(format!(
                "need 0 < d_min <= d_max, got d_min={} d_max={}",
                self.d_min, self.d_max
            ));
        }
        if self.d_max_attacker < self.d_min {
            return bad("attacker radius must be at least d_min".into());
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return bad("bandwidth must be positive".into());
        }
        if !(self.t_pilot >= 0.0 && self.t_data >= 0.0 && self.t_pilot + self.t_data > 0.0) {
            return bad("phase durations must be non-negative with a positive sum".into());
        }
        Ok(())
    }

    /// Fraction of the frame spent on downlink data, `t_d / (t_p + t_d)`.
    pub fn duty_cycle(&self) -> f64 {
        self.t_data / (self.t_pilot + self.t_data)
    }

    /// Attacker-to-pilot power ratio `u_k = P_J / P_k`.
    pub fn power_ratio(&self, user: usize) -> f64 {
        self.attacker_power / self.pilot_power[user]
    }

    /// Channel-estimation noise variance `1 / (P_k L)`.
    pub fn estimation_noise(&self, user: usize) -> f64 {
        1.0 / (self.pilot_power[user] * self.pilot_len as f64)
    }

    /// Converts a spectral efficiency in bit/s/Hz to Mbit/s, accounting for
    /// the data-phase duty cycle.
    pub fn to_mbps(&self, bits_per_hz: f64) -> f64 {
        bits_per_hz * self.bandwidth_hz * self.duty_cycle() / 1e6
    }

    /// Same config with a different user count; pilot powers are extended
    /// or truncated using the first user's pilot power.
    pub fn with_users(&self, users: usize) -> Self {
        let p = self.pilot_power.first().copied().unwrap_or(1.0);
        let mut out = self.clone();
        out.users = users;
        out.pilot_power = vec![p; users];
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::harness::units::{paper_config, Scale};

    #[test]
    fn paper_setup_is_valid() {
        let cfg = paper_config(Scale::Paper);
        cfg.validate().unwrap();
        assert_eq!(cfg.duty_cycle(), 0.5);
        // 1 bit/s/Hz over 20 MHz at half duty
        assert!((cfg.to_mbps(1.0) - 10.0).abs() < 1e-12);
        assert!((cfg.power_ratio(0) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_fields_are_rejected() {
        let base = paper_config(Scale::Desk);
        let mut cases = Vec::new();
        let mut c = base.clone();
        c.antennas = 0;
        cases.push(c);
        let mut c = base.clone();
        c.pilot_power.pop();
        cases.push(c);
        let mut c = base.clone();
        c.d_min = 800.0;
        cases.push(c);
        let mut c = base.clone();
        c.attacker_power = -1.0;
        cases.push(c);
        let mut c = base.clone();
        c.t_pilot = 0.0;
        c.t_data = 0.0;
        cases.push(c);
        let mut c = base.clone();
        c.path_loss_exp = f64::NAN;
        cases.push(c);
        let mut c = base.clone();
        c.d_max_attacker = 5.0;
        cases.push(c);
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn changing_user_count_resizes_pilots() {
        let cfg = paper_config(Scale::Desk).with_users(3);
        assert_eq!(cfg.pilot_power.len(), 3);
        cfg.validate().unwrap();
        assert!((cfg.estimation_noise(2) - 1.0 / (cfg.pilot_power[2] * cfg.pilot_len as f64)).abs() < 1e-30);
    }
}
