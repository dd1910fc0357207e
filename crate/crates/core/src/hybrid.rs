//! Hybrid attack: pilot contamination chosen before the channel is known,
//! plus data-phase jamming from `N` attacker antennas chosen per channel
//! scenario, solved by sample-average approximation.

use crate::attack::{solve_p1_closed_form_budget, P1Coefficients};
use crate::channel::{AttackVector, LargeScale};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::optim::{project_capped_simplex, projected_gradient, simplex_threshold, PgOptions, SmoothObjective};
use crate::rates::{asymptotic_sinr, PowerAllocation};
use crate::rng::{complex_normal, SimRng};

const LN_2: f64 = std::f64::consts::LN_2;

/// Equiprobable draws of the attacker-antenna-to-user fading powers
/// `|g_Jk^(i)|^2`, indexed `[scenario][antenna][user]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    gains: Vec<Vec<Vec<f64>>>,
}

impl ScenarioSet {
    pub fn from_gains(gains: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = gains.first().map(|s| s.len()).unwrap_or(0);
        let k = gains.first().and_then(|s| s.first()).map(|r| r.len()).unwrap_or(0);
        if gains.is_empty() || n == 0 || k == 0 {
            return Err(Error::InvalidArgument("scenario set needs T, N, K >= 1".into()));
        }
        for s in &gains {
            if s.len() != n || s.iter().any(|r| r.len() != k || r.iter().any(|g| !(g.is_finite() && *g >= 0.0))) {
                return Err(Error::InvalidArgument(
                    "scenario gains must be rectangular, finite and non-negative".into(),
                ));
            }
        }
        Ok(Self { gains })
    }

    pub fn scenarios(&self) -> usize {
        self.gains.len()
    }

    pub fn antennas(&self) -> usize {
        self.gains[0].len()
    }

    pub fn users(&self) -> usize {
        self.gains[0][0].len()
    }

    /// `|g|^2` rows of scenario `t`.
    pub fn scenario(&self, t: usize) -> &[Vec<f64>] {
        &self.gains[t]
    }

    /// Same draws restricted to the first `n` attacker antennas.
    pub fn with_antennas(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.antennas() {
            return Err(Error::InvalidArgument(format!(
                "cannot keep {n} of {} antennas",
                self.antennas()
            )));
        }
        Ok(Self {
            gains: self.gains.iter().map(|s| s[..n].to_vec()).collect(),
        })
    }
}

/// Draws `T` scenarios of i.i.d. `CN(0, 1)` gains for `N` antennas and `K`
/// users.
pub fn build_scenarios(rng: &mut SimRng, antennas: usize, users: usize, count: usize) -> Result<ScenarioSet> {
    if antennas == 0 || users == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "scenario set needs N, K, T >= 1 (got {antennas}, {users}, {count})"
        )));
    }
    let gains = (0..count)
        .map(|_| {
            (0..antennas)
                .map(|_| (0..users).map(|_| complex_normal(rng, 1.0).norm_sqr()).collect())
                .collect()
        })
        .collect();
    ScenarioSet::from_gains(gains)
}

/// Which parts of the attack are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    Full,
    /// `beta = 0`: all energy goes to pilot contamination.
    PilotOnly,
    /// `alpha = 0`: data-phase jamming only.
    DataOnly,
}

#[derive(Debug, Clone)]
pub struct HybridPolicy {
    /// First-stage pilot contamination; may exceed one when the data phase
    /// is left silent.
    pub alpha: AttackVector,
    /// `beta[t][i]`: jamming fraction of antenna `i` in scenario `t`.
    pub beta: Vec<Vec<f64>>,
    /// In-sample mean sum-rate (bit/s/Hz).
    pub objective: f64,
    pub iterations: usize,
}

impl HybridPolicy {
    /// Largest `(t_p sum(alpha) + t_d sum(beta_t)) / (t_p + t_d)` over scenarios.
    pub fn budget_usage(&self, cfg: &SystemConfig) -> f64 {
        let pilot = cfg.t_pilot * self.alpha.total();
        let data = self
            .beta
            .iter()
            .map(|b| b.iter().sum::<f64>())
            .fold(0.0, f64::max);
        (pilot + cfg.t_data * data) / (cfg.t_pilot + cfg.t_data)
    }
}

/// SAA objective over `x = [alpha (K); beta (T x N)]`:
/// `(1/T) sum_t sum_k log2(1 + S_k(alpha_k) / (E_k(t) + 1))`.
struct SaaObjective {
    /// Attack-free SINR `S_k(0)`.
    sinr: Vec<f64>,
    /// `u_k theta_J`.
    jam_slope: Vec<f64>,
    /// `theta_k + 1/(P_k L)`.
    phi0: Vec<f64>,
    /// `c[t][i][k] = P_J |g|^2 theta_Jk`.
    c: Vec<Vec<Vec<f64>>>,
    users: usize,
    antennas: usize,
}

impl SaaObjective {
    fn new(ls: &LargeScale, pa: &PowerAllocation, cfg: &SystemConfig, gains: &[Vec<Vec<f64>>]) -> Self {
        let k = ls.users();
        let c = gains
            .iter()
            .map(|s| {
                s.iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .map(|(k, g)| cfg.attacker_power * g * ls.attacker_user_gain[k])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            sinr: asymptotic_sinr(ls, &AttackVector::zeros(k), pa, cfg),
            jam_slope: (0..k).map(|k| cfg.power_ratio(k) * ls.attacker_gain).collect(),
            phi0: (0..k).map(|k| ls.user_gain[k] + cfg.estimation_noise(k)).collect(),
            c,
            users: k,
            antennas: gains[0].len(),
        }
    }

    fn eval(&self, x: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let (alpha, beta) = x.split_at(self.users);
        let t_count = self.c.len();
        let scale = 1.0 / t_count as f64;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut value = 0.0;
        for t in 0..t_count {
            let b = &beta[t * self.antennas..(t + 1) * self.antennas];
            for k in 0..self.users {
                let phi = self.phi0[k] + alpha[k] * self.jam_slope[k];
                let s = self.sinr[k] * self.phi0[k] / phi;
                let e1 = 1.0 + b.iter().zip(&self.c[t]).map(|(b, row)| b * row[k]).sum::<f64>();
                value += (s / e1).ln_1p();
                if let Some(g) = grad.as_deref_mut() {
                    let denom = (e1 + s) * LN_2;
                    g[k] -= scale * s * self.jam_slope[k] / (phi * denom);
                    for i in 0..self.antennas {
                        g[self.users + t * self.antennas + i] -= scale * s * self.c[t][i][k] / (e1 * denom);
                    }
                }
            }
        }
        value * scale / LN_2
    }
}

impl SmoothObjective for SaaObjective {
    fn dim(&self) -> usize {
        self.users + self.c.len() * self.antennas
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x, None)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.eval(x, Some(grad));
    }
}

/// The SAA objective in variables `[alpha; beta / sigma]`. With
/// `sigma = sqrt(T)` both blocks have curvature of the same order, which
/// keeps the spectral step sizes meaningful for large `T`.
struct Scaled<'a> {
    inner: &'a SaaObjective,
    sigma: f64,
}

impl Scaled<'_> {
    fn unscale(&self, x: &[f64]) -> Vec<f64> {
        let k = self.inner.users;
        x.iter()
            .enumerate()
            .map(|(i, v)| if i < k { *v } else { v * self.sigma })
            .collect()
    }
}

impl SmoothObjective for Scaled<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&self.unscale(x))
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.inner.gradient(&self.unscale(x), grad);
        grad[self.inner.users..].iter_mut().for_each(|g| *g *= self.sigma);
    }
}

/// Euclidean projection onto
/// `{alpha >= 0, beta >= 0, t_p sum(alpha) + t_d sum(beta_t) <= t_p + t_d for all t}`.
///
/// For a pilot share `s = sum(alpha)` the problem splits into independent
/// capped-simplex projections; the squared distance is convex in `s` with
/// derivative `-2 tau_alpha(s) + 2 (t_p / t_d) sum_t tau_t(r_t(s))`, which is
/// bisected to zero.
pub fn project_joint(x: &[f64], users: usize, antennas: usize, t_pilot: f64, t_data: f64) -> Vec<f64> {
    project_joint_budget(x, users, antennas, t_pilot, t_data, t_pilot + t_data)
}

/// [`project_joint`] with an explicit right-hand side `cap`.
fn project_joint_budget(x: &[f64], users: usize, antennas: usize, t_pilot: f64, t_data: f64, cap: f64) -> Vec<f64> {
    let (a, b) = x.split_at(users);
    let s_max = cap / t_pilot;
    let blocks: Vec<&[f64]> = b.chunks(antennas).collect();
    let slope = |s: f64| -> f64 {
        let r = (cap - t_pilot * s) / t_data;
        let tb: f64 = blocks.iter().map(|blk| simplex_threshold(blk, r.max(0.0))).sum();
        -simplex_threshold(a, s) + t_pilot / t_data * tb
    };
    let s = if slope(0.0) >= 0.0 {
        0.0
    } else if slope(s_max) <= 0.0 {
        s_max
    } else {
        let (mut lo, mut hi) = (0.0, s_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let r = ((cap - t_pilot * s) / t_data).max(0.0);
    let mut out = project_capped_simplex(a, s);
    for blk in blocks {
        out.extend(project_capped_simplex(blk, r));
    }
    out
}

/// Solves the sample-average hybrid attack problem for a fixed BS power
/// allocation. `warm` may carry a policy for fewer antennas (extra antennas
/// start silent).
pub fn solve_p6_saa(
    cfg: &SystemConfig,
    ls: &LargeScale,
    pa: &PowerAllocation,
    set: &ScenarioSet,
    restriction: Restriction,
    tol: f64,
    warm: Option<&HybridPolicy>,
) -> Result<HybridPolicy> {
    let k = ls.users();
    if set.users() != k {
        return Err(Error::InvalidArgument(format!(
            "scenario set has {} users, topology has {k}",
            set.users()
        )));
    }
    let t_count = set.scenarios();
    let n = set.antennas();
    let cap = cfg.t_pilot + cfg.t_data;
    let restriction = if cfg.t_data <= 0.0 { Restriction::PilotOnly } else { restriction };
    let objective = SaaObjective::new(ls, pa, cfg, &set.gains);

    let pilot_budget = cap / cfg.t_pilot;
    let mut x0 = vec![0.0; k + t_count * n];
    match warm {
        Some(w) => {
            if w.alpha.len() != k || w.beta.len() != t_count || w.beta.iter().any(|b| b.len() > n) {
                return Err(Error::InvalidArgument("warm start does not match the problem".into()));
            }
            x0[..k].copy_from_slice(w.alpha.as_slice());
            for (t, b) in w.beta.iter().enumerate() {
                x0[k + t * n..k + t * n + b.len()].copy_from_slice(b);
            }
        }
        None if restriction != Restriction::DataOnly && cfg.attacker_power > 0.0 => {
            let coef = P1Coefficients::from_gains(ls, pa, cfg)?;
            let a = solve_p1_closed_form_budget(&coef, pilot_budget)?.alpha;
            x0[..k].copy_from_slice(a.as_slice());
        }
        None => {
            for t in 0..t_count {
                x0[k + t * n..k + (t + 1) * n].fill(cap / cfg.t_data.max(f64::MIN_POSITIVE) / n as f64);
            }
        }
    }

    let sigma = (t_count as f64).sqrt();
    x0[k..].iter_mut().for_each(|v| *v /= sigma);
    let (t_p, t_d) = (cfg.t_pilot, cfg.t_data * sigma);
    let project = move |y: &[f64]| -> Vec<f64> {
        match restriction {
            Restriction::Full => project_joint_budget(y, k, n, t_p, t_d, cap),
            Restriction::PilotOnly => {
                let mut out = project_capped_simplex(&y[..k], pilot_budget);
                out.resize(y.len(), 0.0);
                out
            }
            Restriction::DataOnly => {
                let mut out = vec![0.0; k];
                for blk in y[k..].chunks(n) {
                    out.extend(project_capped_simplex(blk, cap / t_d));
                }
                out
            }
        }
    };
    let opts = PgOptions {
        tol,
        ..PgOptions::default()
    };
    let scaled = Scaled {
        inner: &objective,
        sigma,
    };
    let mut r = if cfg.attacker_power > 0.0 {
        projected_gradient(&scaled, &x0, project, opts)?
    } else {
        let x = vec![0.0; objective.dim()];
        crate::optim::PgResult {
            value: objective.value(&x),
            x,
            iterations: 0,
            pg_norm: 0.0,
        }
    };
    r.x = scaled.unscale(&r.x);
    let alpha = AttackVector::with_budget(r.x[..k].to_vec(), pilot_budget)?;
    let beta = r.x[k..].chunks(n).map(|c| c.to_vec()).collect();
    Ok(HybridPolicy {
        alpha,
        beta,
        objective: r.value,
        iterations: r.iterations,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct OutOfSample {
    /// Mean sum-rate (bit/s/Hz) over the fresh scenarios.
    pub mean: f64,
    pub stderr: f64,
    pub scenarios: usize,
}

/// Evaluates the first-stage attack of `policy` on fresh scenarios,
/// re-optimizing the jamming of each scenario for the fixed `alpha`.
pub fn evaluate_policy_out_of_sample(
    cfg: &SystemConfig,
    ls: &LargeScale,
    pa: &PowerAllocation,
    alpha: &AttackVector,
    fresh: &ScenarioSet,
    tol: f64,
) -> Result<OutOfSample> {
    let k = ls.users();
    let n = fresh.antennas();
    let left = if cfg.t_data > 0.0 {
        ((cfg.t_pilot + cfg.t_data - cfg.t_pilot * alpha.total()) / cfg.t_data).max(0.0)
    } else {
        0.0
    };
    let mut values = Vec::with_capacity(fresh.scenarios());
    for t in 0..fresh.scenarios() {
        let obj = SaaObjective::new(ls, pa, cfg, &fresh.gains[t..t + 1]);
        let fixed = alpha.as_slice().to_vec();
        let value = if left > 0.0 && cfg.attacker_power > 0.0 {
            let mut x0 = fixed.clone();
            x0.extend(std::iter::repeat(left / n as f64).take(n));
            let project = |y: &[f64]| -> Vec<f64> {
                let mut out = fixed.clone();
                out.extend(project_capped_simplex(&y[k..], left));
                out
            };
            projected_gradient(
                &obj,
                &x0,
                project,
                PgOptions {
                    tol,
                    ..PgOptions::default()
                },
            )?
            .value
        } else {
            let mut x = fixed.clone();
            x.resize(k + n, 0.0);
            obj.value(&x)
        };
        values.push(value);
    }
    let (mean, stderr) = crate::stats::mean_stderr(&values);
    Ok(OutOfSample {
        mean,
        stderr,
        scenarios: values.len(),
    })
}
