//! Downlink rates: finite-M Monte Carlo rates under MRT, their large-M
//! limits, eavesdropper leakage, individual secrecy and jammed rates.
//!
//! All rates are spectral efficiencies in bit/s/Hz (log base 2).

use crate::channel::{dot, AttackVector, ChannelRealization, EstimatedChannels, LargeScale, BUDGET_TOL};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Leakage reported when a user is the only contaminated one and the
/// eavesdropper therefore sees it interference-free.
pub const LEAKAGE_CAP: f64 = 60.0;

/// Downlink power per user, `sum(Pd) <= P_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation(Vec<f64>);

impl PowerAllocation {
    pub fn new(powers: Vec<f64>, budget: f64) -> Result<Self> {
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "downlink powers must be finite and non-negative, got {p}"
            )));
        }
        let total: f64 = powers.iter().sum();
        if total > budget * (1.0 + BUDGET_TOL) {
            return Err(Error::InvalidArgument(format!(
                "downlink powers sum to {total}, above the budget {budget}"
            )));
        }
        Ok(Self(powers))
    }

    /// `P_A / K` to every user.
    pub fn uniform(users: usize, budget: f64) -> Self {
        Self(vec![budget / users as f64; users])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_raw(powers: Vec<f64>) -> Self {
        Self(powers)
    }
}

impl std::ops::Index<usize> for PowerAllocation {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Jain's index of `rates`.
    pub fairness: f64,
}

impl RateReport {
    pub fn from_rates(rates: Vec<f64>) -> Self {
        let sum_rate = rates.iter().sum();
        let fairness = jain_fairness(&rates);
        Self {
            rates,
            sum_rate,
            fairness,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leakage {
    pub rates: Vec<f64>,
    /// `true` where the leakage hit [`LEAKAGE_CAP`] because no other user
    /// was contaminated.
    pub saturated: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyReport {
    pub rates: Vec<f64>,
    pub leakage: Vec<f64>,
    pub leakage_saturated: Vec<bool>,
    /// `[R_k - R_k^e]^+`.
    pub secrecy: Vec<f64>,
    pub max_secrecy: f64,
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Jain's fairness index `(sum R)^2 / (K sum R^2)`; all-zero input is
/// treated as perfectly fair.
pub fn jain_fairness(rates: &[f64]) -> f64 {
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return 1.0;
    }
    sum * sum / (rates.len() as f64 * sq)
}

/// `|h_k v_l^T|^2` for every pair, with `h_k = sqrt(theta_k) g_k`.
fn cross_gains(real: &ChannelRealization, ls: &LargeScale, est: &EstimatedChannels) -> Vec<Vec<f64>> {
    real.users
        .iter()
        .zip(&ls.user_gain)
        .map(|(g, theta)| {
            est.precoders
                .iter()
                .map(|v| theta * dot(g, v).norm_sqr())
                .collect()
        })
        .collect()
}

fn sinr_rates(gains: &[Vec<f64>], pa: &PowerAllocation) -> Vec<f64> {
    gains
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let interference: f64 = row
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != k)
                .map(|(l, x)| pa[l] * x)
                .sum();
            log2_1p(pa[k] * row[k] / (interference + 1.0))
        })
        .collect()
}

/// Finite-M achievable rates with MRT on the estimated channels.
pub fn exact_rates(
    real: &ChannelRealization,
    ls: &LargeScale,
    est: &EstimatedChannels,
    pa: &PowerAllocation,
) -> RateReport {
    RateReport::from_rates(sinr_rates(&cross_gains(real, ls, est), pa))
}

/// Finite-M leakage at the attacker, treating the other streams as noise.
pub fn exact_leakage_rates(
    real: &ChannelRealization,
    ls: &LargeScale,
    est: &EstimatedChannels,
    pa: &PowerAllocation,
) -> Vec<f64> {
    let att_gain: Vec<f64> = est
        .precoders
        .iter()
        .map(|v| ls.attacker_gain * dot(&real.attacker, v).norm_sqr())
        .collect();
    let total: f64 = att_gain.iter().zip(pa.as_slice()).map(|(x, p)| x * p).sum();
    att_gain
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let signal = pa[k] * x;
            log2_1p(signal / (total - signal + 1.0))
        })
        .collect()
}

/// Effective estimation denominator
/// `phi_k = theta_k + alpha_k u_k theta_J + 1/(P_k L)`.
pub fn effective_noise(ls: &LargeScale, attack: &AttackVector, cfg: &SystemConfig) -> Vec<f64> {
    (0..ls.users())
        .map(|k| {
            ls.user_gain[k]
                + attack[k] * cfg.power_ratio(k) * ls.attacker_gain
                + cfg.estimation_noise(k)
        })
        .collect()
}

/// Large-M SINRs `Pd_k M theta_k^2 / phi_k`.
pub fn asymptotic_sinr(
    ls: &LargeScale,
    attack: &AttackVector,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> Vec<f64> {
    let m = cfg.antennas as f64;
    effective_noise(ls, attack, cfg)
        .iter()
        .enumerate()
        .map(|(k, phi)| pa[k] * m * ls.user_gain[k].powi(2) / phi)
        .collect()
}

/// Large-M rates under a pilot-contamination attack; with `alpha = 0` this
/// is the attack-free channel-hardening rate.
pub fn asymptotic_rates(
    ls: &LargeScale,
    attack: &AttackVector,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> RateReport {
    RateReport::from_rates(asymptotic_sinr(ls, attack, pa, cfg).into_iter().map(log2_1p).collect())
}

/// Large-M per-user received power at the attacker,
/// `Pd_k alpha_k u_k theta_J^2 / phi_k`.
pub fn leakage_powers(
    ls: &LargeScale,
    attack: &AttackVector,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> Vec<f64> {
    effective_noise(ls, attack, cfg)
        .iter()
        .enumerate()
        .map(|(k, phi)| pa[k] * attack[k] * cfg.power_ratio(k) * ls.attacker_gain.powi(2) / phi)
        .collect()
}

/// Large-M leakage rates (independent of `M`). A contaminated user whose
/// leakage sees no interference is capped at [`LEAKAGE_CAP`] and flagged.
pub fn leakage_rates(
    ls: &LargeScale,
    attack: &AttackVector,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> Leakage {
    let s = leakage_powers(ls, attack, pa, cfg);
    let total: f64 = s.iter().sum();
    let mut rates = Vec::with_capacity(s.len());
    let mut saturated = Vec::with_capacity(s.len());
    for &sk in &s {
        if sk <= 0.0 {
            rates.push(0.0);
            saturated.push(false);
            continue;
        }
        let others = total - sk;
        if others <= sk * f64::EPSILON {
            rates.push(LEAKAGE_CAP);
            saturated.push(true);
        } else {
            let r = log2_1p(sk / others);
            saturated.push(r >= LEAKAGE_CAP);
            rates.push(r.min(LEAKAGE_CAP));
        }
    }
    Leakage { rates, saturated }
}

pub fn secrecy_report(
    ls: &LargeScale,
    attack: &AttackVector,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> SecrecyReport {
    let rates = asymptotic_rates(ls, attack, pa, cfg).rates;
    let leak = leakage_rates(ls, attack, pa, cfg);
    let secrecy: Vec<f64> = rates
        .iter()
        .zip(&leak.rates)
        .map(|(r, e)| (r - e).max(0.0))
        .collect();
    let max_secrecy = secrecy.iter().copied().fold(0.0, f64::max);
    SecrecyReport {
        rates,
        leakage: leak.rates,
        leakage_saturated: leak.saturated,
        secrecy,
        max_secrecy,
    }
}

/// Received data-phase jamming power at each user,
/// `E_k = sum_i beta_i P_J |g_Jk^(i)|^2 theta_Jk`. `jam_power_gains[i][k]`
/// holds `|g_Jk^(i)|^2`.
pub fn jamming_powers(
    ls: &LargeScale,
    beta: &[f64],
    jam_power_gains: &[Vec<f64>],
    cfg: &SystemConfig,
) -> Vec<f64> {
    (0..ls.users())
        .map(|k| {
            let gain: f64 = beta
                .iter()
                .zip(jam_power_gains)
                .map(|(b, row)| b * row[k])
                .sum();
            gain * cfg.attacker_power * ls.attacker_user_gain[k]
        })
        .collect()
}

/// Large-M rates with pilot contamination `attack` and data-phase jamming
/// `beta` from the attacker's `N` antennas.
pub fn hybrid_sum_rate(
    ls: &LargeScale,
    attack: &AttackVector,
    beta: &[f64],
    jam_power_gains: &[Vec<f64>],
    pa: &PowerAllocation,
    cfg: &SystemConfig,
) -> Result<RateReport> {
    if beta.len() != jam_power_gains.len() {
        return Err(Error::InvalidArgument(format!(
            "{} jamming fractions for {} attacker antennas",
            beta.len(),
            jam_power_gains.len()
        )));
    }
    if let Some(b) = beta.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "jamming fractions must be non-negative, got {b}"
        )));
    }
    let sinr = asymptotic_sinr(ls, attack, pa, cfg);
    let jam = jamming_powers(ls, beta, jam_power_gains, cfg);
    Ok(RateReport::from_rates(
        sinr.iter()
            .zip(&jam)
            .map(|(s, e)| log2_1p(s / (e + 1.0)))
            .collect(),
    ))
}
