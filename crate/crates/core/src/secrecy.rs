//! Attacks that minimize the largest individual secrecy rate: exhaustive
//! grid search on the exact rates, the greedy bound-based method, and its
//! chance-constrained variant for unknown user distances.

use rand::Rng;

use crate::channel::{annulus_radius, AttackVector, LargeScale};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rates::{PowerAllocation, LEAKAGE_CAP};
use crate::rng::SimRng;

/// Per-user coefficients of the known-topology secrecy bound
/// `f_k(a) = I_k (a + A_k + B_k) / (a (I_k + G_k) + B_k I_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecrecyCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `G_k = Pd_k theta_J`.
    pub g: Vec<f64>,
    /// `I_k = sum_{l != k} G_l / B_l`.
    pub i: Vec<f64>,
}

impl SecrecyCoefficients {
    pub fn from_gains(ls: &LargeScale, pa: &PowerAllocation, cfg: &SystemConfig) -> Result<Self> {
        let p1 = crate::attack::P1Coefficients::from_gains(ls, pa, cfg)?;
        let g: Vec<f64> = pa.as_slice().iter().map(|p| p * ls.attacker_gain).collect();
        let ratio: Vec<f64> = g.iter().zip(&p1.b).map(|(g, b)| g / b).collect();
        let total: f64 = ratio.iter().sum();
        let i = ratio.iter().map(|r| total - r).collect();
        Ok(Self {
            a: p1.a,
            b: p1.b,
            g,
            i,
        })
    }

    pub fn users(&self) -> usize {
        self.a.len()
    }

    /// `f_k(alpha_k)`; `log2 f_k` upper-bounds `R_k - R_k^e` for every
    /// feasible attack.
    pub fn f(&self, k: usize, alpha_k: f64) -> f64 {
        let (a, b, g, i) = (self.a[k], self.b[k], self.g[k], self.i[k]);
        i * (alpha_k + a + b) / (alpha_k * (i + g) + b * i)
    }

    /// `U_k = log2 f_k(alpha_k)`.
    pub fn upper_bound(&self, k: usize, alpha_k: f64) -> f64 {
        self.f(k, alpha_k).log2()
    }
}

/// Fast evaluation of the exact large-M secrecy rates over many attacks.
struct SecrecyEvaluator {
    signal: Vec<f64>,
    base: Vec<f64>,
    jam: Vec<f64>,
    leak: Vec<f64>,
}

impl SecrecyEvaluator {
    fn new(ls: &LargeScale, pa: &PowerAllocation, cfg: &SystemConfig) -> Self {
        let m = cfg.antennas as f64;
        let k = ls.users();
        Self {
            signal: (0..k).map(|k| pa[k] * m * ls.user_gain[k].powi(2)).collect(),
            base: (0..k).map(|k| ls.user_gain[k] + cfg.estimation_noise(k)).collect(),
            jam: (0..k).map(|k| cfg.power_ratio(k) * ls.attacker_gain).collect(),
            leak: (0..k)
                .map(|k| pa[k] * cfg.power_ratio(k) * ls.attacker_gain.powi(2))
                .collect(),
        }
    }

    /// `max(0, max_k R_k - R_k^e)`, matching [`crate::rates::secrecy_report`].
    fn max_secrecy(&self, alpha: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        let mut total = 0.0;
        for k in 0..alpha.len() {
            let phi = self.base[k] + alpha[k] * self.jam[k];
            let s = self.leak[k] * alpha[k] / phi;
            total += s;
            scratch.push(phi);
            scratch.push(s);
        }
        let mut best: f64 = 0.0;
        for k in 0..alpha.len() {
            let (phi, s) = (scratch[2 * k], scratch[2 * k + 1]);
            let rate = (self.signal[k] / phi).ln_1p() / std::f64::consts::LN_2;
            let leak = if s <= 0.0 {
                0.0
            } else if total - s <= s * f64::EPSILON {
                LEAKAGE_CAP
            } else {
                ((s / (total - s)).ln_1p() / std::f64::consts::LN_2).min(LEAKAGE_CAP)
            };
            best = best.max(rate - leak);
        }
        best
    }
}

/// Largest individual secrecy rate (bit/s/Hz) under `alpha`.
pub fn max_secrecy(ls: &LargeScale, alpha: &[f64], pa: &PowerAllocation, cfg: &SystemConfig) -> f64 {
    SecrecyEvaluator::new(ls, pa, cfg).max_secrecy(alpha, &mut Vec::new())
}

/// Default cap on the number of grid points examined by the brute force.
pub const DEFAULT_GRID_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone)]
pub struct P4Solution {
    pub alpha: AttackVector,
    /// Minimal largest secrecy rate on the grid (bit/s/Hz).
    pub nu: f64,
    pub points: u128,
}

/// Number of points of `{c in N^K : sum c <= n}`, i.e. `C(n + K, K)`.
pub fn grid_points(users: usize, divisions: usize) -> u128 {
    let mut acc: u128 = 1;
    for j in 1..=users as u128 {
        acc = acc * (divisions as u128 + j) / j;
    }
    acc
}

/// Exhaustive search of `max_k [R_k - R_k^e]^+` over the simplex grid with
/// step `1/divisions` (including points with `sum(alpha) < 1`).
pub fn solve_p4_bruteforce(
    ls: &LargeScale,
    pa: &PowerAllocation,
    cfg: &SystemConfig,
    divisions: usize,
    budget: u128,
) -> Result<P4Solution> {
    if divisions == 0 {
        return Err(Error::InvalidArgument("grid needs at least one division".into()));
    }
    let k = ls.users();
    let points = grid_points(k, divisions);
    if points > budget {
        return Err(Error::Capacity { points, budget });
    }
    let eval = SecrecyEvaluator::new(ls, pa, cfg);
    let step = 1.0 / divisions as f64;
    let mut counts = vec![0usize; k];
    let mut alpha = vec![0.0; k];
    let mut scratch = Vec::with_capacity(2 * k);
    let mut best = (f64::INFINITY, vec![0.0; k]);
    // odometer over compositions with sum(counts) <= divisions
    loop {
        for (a, c) in alpha.iter_mut().zip(&counts) {
            *a = *c as f64 * step;
        }
        let v = eval.max_secrecy(&alpha, &mut scratch);
        if v < best.0 {
            best = (v, alpha.clone());
        }
        let used: usize = counts.iter().sum();
        let mut pos = 0;
        if used < divisions {
            counts[0] += 1;
            continue;
        }
        let mut rem = used;
        loop {
            rem -= counts[pos];
            counts[pos] = 0;
            pos += 1;
            if pos == k {
                return Ok(P4Solution {
                    alpha: AttackVector::new(best.1)?,
                    nu: best.0,
                    points,
                });
            }
            if rem < divisions {
                counts[pos] += 1;
                break;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GreedyResult {
    pub alpha: AttackVector,
    /// `max(1, max_k f_k(alpha_k))` at the returned attack.
    pub nu_hat: f64,
    /// `max(1, max_k f_k)` before each step; non-increasing.
    pub trajectory: Vec<f64>,
}

impl GreedyResult {
    /// `log2(nu_hat)`, the guaranteed largest secrecy rate.
    pub fn secrecy_bound(&self) -> f64 {
        self.nu_hat.log2()
    }
}

pub const DEFAULT_DELTA: f64 = 1e-3;

/// Repeatedly raises the attack on the user with the largest bound (lowest
/// index on ties) by `delta` until the budget is spent or every bound is
/// below one. `f` must be decreasing in its second argument.
pub fn greedy_minmax<F: Fn(usize, f64) -> f64>(users: usize, delta: f64, f: F) -> Result<GreedyResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("greedy step must be positive, got {delta}")));
    }
    if users == 0 {
        return Err(Error::InvalidArgument("no users".into()));
    }
    let mut alpha = vec![0.0; users];
    let mut used = 0.0;
    let mut trajectory = Vec::new();
    let argmax = |alpha: &[f64]| -> (usize, f64) {
        let mut best = (0, f(0, alpha[0]));
        for (k, a) in alpha.iter().enumerate().skip(1) {
            let v = f(k, *a);
            if v > best.1 {
                best = (k, v);
            }
        }
        best
    };
    loop {
        let (i, top) = argmax(&alpha);
        trajectory.push(top.max(1.0));
        if top < 1.0 || used >= 1.0 {
            break;
        }
        let step = delta.min(1.0 - used);
        alpha[i] += step;
        used = if step < delta { 1.0 } else { used + step };
    }
    let nu_hat = argmax(&alpha).1.max(1.0);
    Ok(GreedyResult {
        alpha: AttackVector::new(alpha)?,
        nu_hat,
        trajectory,
    })
}

/// Greedy min-max of the known-topology bound `f_k`.
pub fn solve_p5_greedy(coef: &SecrecyCoefficients, delta: f64) -> Result<GreedyResult> {
    greedy_minmax(coef.users(), delta, |k, a| coef.f(k, a))
}

/// Coefficients of the chance-constrained bound when user distances are
/// only known in distribution and the attacker distance `z_J` is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ChanceCoefficients {
    /// Worst-case interference bound `I_hat_k` (all other users at `D_max`
    /// and fully attacked).
    pub i_hat: Vec<f64>,
    /// `Q = (eps (D_max^2 - D_min^2) + D_min^2)^gamma`.
    pub q: f64,
    pub epsilon: f64,
    pd: Vec<f64>,
    u: Vec<f64>,
    noise: Vec<f64>,
    m: f64,
    path_const: f64,
    /// `z_J^-gamma`.
    zj_g: f64,
}

impl ChanceCoefficients {
    pub fn new(cfg: &SystemConfig, pa: &PowerAllocation, attacker_dist: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in [0, 1], got {epsilon}")));
        }
        if !(attacker_dist > 0.0) {
            return Err(Error::Domain(format!("attacker distance must be positive, got {attacker_dist}")));
        }
        let k = cfg.users;
        let theta_j = crate::channel::path_gain(attacker_dist, cfg)?;
        let theta_far = crate::channel::path_gain(cfg.d_max, cfg)?;
        let pd: Vec<f64> = pa.as_slice().to_vec();
        let u: Vec<f64> = (0..k).map(|k| cfg.power_ratio(k)).collect();
        let noise: Vec<f64> = (0..k).map(|k| cfg.estimation_noise(k)).collect();
        let worst: Vec<f64> = (0..k)
            .map(|l| pd[l] * u[l] * theta_j * theta_j / (u[l] * theta_j + theta_far + noise[l]))
            .collect();
        let total: f64 = worst.iter().sum();
        let span = cfg.d_max * cfg.d_max - cfg.d_min * cfg.d_min;
        Ok(Self {
            i_hat: worst.iter().map(|w| total - w).collect(),
            q: (epsilon * span + cfg.d_min * cfg.d_min).powf(cfg.path_loss_exp),
            epsilon,
            pd,
            u,
            noise,
            m: cfg.antennas as f64,
            path_const: cfg.path_loss_const,
            zj_g: attacker_dist.powf(-cfg.path_loss_exp),
        })
    }

    pub fn users(&self) -> usize {
        self.pd.len()
    }

    /// Left-hand side of the converted chance constraint for user `k`;
    /// decreasing in `alpha_k`.
    pub fn lhs(&self, k: usize, alpha_k: f64) -> f64 {
        let a = self.path_const;
        let ih = self.i_hat[k];
        let x = alpha_k * self.u[k] * self.zj_g + self.noise[k] / a;
        let num = ih * (self.pd[k] * self.m * a + 1.0 + self.q * x);
        let den = ih + self.q * (self.pd[k] * alpha_k * self.u[k] * a * self.zj_g * self.zj_g + ih * x);
        num / den
    }

    /// Known-distance bound with the worst-case interference `I_hat_k`:
    /// `(1 + SINR_k) / (1 + S_k / I_hat_k)` for a user with gain `theta_k`.
    pub fn known_distance_ratio(&self, k: usize, alpha_k: f64, theta_k: f64) -> f64 {
        let theta_j = self.path_const * self.zj_g;
        let phi = theta_k + alpha_k * self.u[k] * theta_j + self.noise[k];
        let sinr = self.pd[k] * self.m * theta_k * theta_k / phi;
        let s = self.pd[k] * alpha_k * self.u[k] * theta_j * theta_j / phi;
        (1.0 + sinr) / (1.0 + s / self.i_hat[k])
    }
}

/// Free-function form of [`ChanceCoefficients::lhs`].
pub fn chance_constraint_lhs(coef: &ChanceCoefficients, k: usize, alpha_k: f64) -> f64 {
    coef.lhs(k, alpha_k)
}

/// Greedy min-max of the chance-constrained bound.
pub fn solve_p5_chance(coef: &ChanceCoefficients, delta: f64) -> Result<GreedyResult> {
    if !(coef.epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive for the chance-constrained attack".into()));
    }
    greedy_minmax(coef.users(), delta, |k, a| coef.lhs(k, a))
}

#[derive(Debug, Clone, Copy)]
pub struct ChanceValidation {
    /// Fraction of (user, draw) pairs whose secrecy rate exceeds the
    /// threshold (strictly, so zero-secrecy Bobs never count at threshold 0).
    pub exceedance: f64,
    /// Fraction of (user, draw) pairs with zero secrecy rate.
    pub zero_fraction: f64,
    /// Binomial standard error of `exceedance` at level `epsilon`.
    pub sigma: f64,
    pub samples: usize,
}

/// Monte Carlo check of a chance-constrained attack: draws fresh user
/// distances on the annulus (attacker distance fixed) and counts Bobs whose
/// large-M secrecy rate reaches `threshold` (bit/s/Hz).
pub fn validate_chance(
    cfg: &SystemConfig,
    pa: &PowerAllocation,
    alpha: &AttackVector,
    attacker_dist: f64,
    threshold: f64,
    epsilon: f64,
    draws: usize,
    rng: &mut SimRng,
) -> Result<ChanceValidation> {
    if draws == 0 {
        return Err(Error::InvalidArgument("validation needs at least one draw".into()));
    }
    let mut exceed = 0usize;
    let mut zero = 0usize;
    for _ in 0..draws {
        let dist: Vec<f64> = (0..cfg.users)
            .map(|_| annulus_radius(rng.random(), cfg.d_min, cfg.d_max))
            .collect();
        let ls = LargeScale::from_topology(&crate::channel::Topology::new(dist, attacker_dist), cfg)?;
        let rep = crate::rates::secrecy_report(&ls, alpha, pa, cfg);
        for s in &rep.secrecy {
            if *s > threshold {
                exceed += 1;
            }
            if *s <= 0.0 {
                zero += 1;
            }
        }
    }
    let n = draws * cfg.users;
    Ok(ChanceValidation {
        exceedance: exceed as f64 / n as f64,
        zero_fraction: zero as f64 / n as f64,
        sigma: (epsilon * (1.0 - epsilon) / n as f64).sqrt(),
        samples: n,
    })
}
