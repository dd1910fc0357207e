//! Optimal pilot-contamination attacks against the downlink sum-rate.
//!
//! * known topology, fixed BS powers: closed-form KKT solution with a
//!   bisection on the multiplier, plus an independent projected-gradient
//!   solver;
//! * random topology: expectation over the annulus laws by Simpson's rule;
//! * BS that water-fills against the attack: Gauss-Seidel best responses on
//!   the resulting convex-concave game;
//! * expected value of perfect information (EVPI) of the topology.

use rand::Rng;

use crate::channel::{sample_topology, AttackVector, LargeScale, Topology};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::optim::{project_capped_simplex, projected_gradient, PgOptions, PgResult, SmoothObjective};
use crate::quadrature::DistanceLaw;
use crate::rates::{asymptotic_rates, PowerAllocation};
use crate::rng::SimRng;

const LN_2: f64 = std::f64::consts::LN_2;

/// Coefficients of the per-topology attack objective
/// `sum_k log2(1 + A_k / (alpha_k + B_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Coefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl P1Coefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "coefficient lengths differ or are empty: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || b.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(
                "coefficients must be finite with A_k >= 0 and B_k > 0".into(),
            ));
        }
        Ok(Self { a, b })
    }

    /// `A_k = Pd_k M theta_k^2 / (u_k theta_J)`,
    /// `B_k = (theta_k + 1/(P_k L)) / (u_k theta_J)`.
    pub fn from_gains(ls: &LargeScale, pa: &PowerAllocation, cfg: &SystemConfig) -> Result<Self> {
        if cfg.attacker_power <= 0.0 {
            return Err(Error::InvalidArgument(
                "attack coefficients are undefined without attacker power".into(),
            ));
        }
        let m = cfg.antennas as f64;
        let (a, b) = (0..ls.users())
            .map(|k| {
                let scale = cfg.power_ratio(k) * ls.attacker_gain;
                let theta = ls.user_gain[k];
                (
                    pa[k] * m * theta * theta / scale,
                    (theta + cfg.estimation_noise(k)) / scale,
                )
            })
            .unzip();
        Self::new(a, b)
    }

    pub fn users(&self) -> usize {
        self.a.len()
    }

    /// Sum-rate (bit/s/Hz) at `alpha`.
    pub fn objective(&self, alpha: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .zip(alpha)
            .map(|((a, b), x)| (a / (x + b)).ln_1p())
            .sum::<f64>()
            / LN_2
    }

    /// Per-coordinate KKT term `A_k / ((alpha_k + B_k)(alpha_k + A_k + B_k))`,
    /// the negative natural-log derivative.
    pub fn marginal(&self, k: usize, alpha_k: f64) -> f64 {
        let (a, b) = (self.a[k], self.b[k]);
        a / ((alpha_k + b) * (alpha_k + a + b))
    }
}

impl SmoothObjective for P1Coefficients {
    fn dim(&self) -> usize {
        self.users()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.objective(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (k, g) in grad.iter_mut().enumerate() {
            *g = -self.marginal(k, x[k]) / LN_2;
        }
    }
}

#[derive(Debug, Clone)]
pub struct P1Solution {
    pub alpha: AttackVector,
    /// KKT multiplier of the budget constraint (natural-log scale).
    pub lambda: f64,
}

/// Stationary point of coordinate `k` for multiplier `lambda`:
/// `[(sqrt(A(A + 4/lambda)) - A - 2B) / 2]^+`, evaluated without cancellation.
fn alpha_at(a: f64, b: f64, lambda: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let disc = 4.0 * a / lambda;
    let root_minus_a = disc / ((a * a + disc).sqrt() + a);
    let v = 0.5 * root_minus_a - b;
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Closed-form attack for a given multiplier.
pub fn closed_form_alpha(coef: &P1Coefficients, lambda: f64) -> Vec<f64> {
    coef.a
        .iter()
        .zip(&coef.b)
        .map(|(&a, &b)| alpha_at(a, b, lambda))
        .collect()
}

pub fn solve_p1_closed_form(coef: &P1Coefficients) -> Result<P1Solution> {
    solve_p1_closed_form_budget(coef, 1.0)
}

/// Closed-form minimizer of the P1 objective over
/// `{alpha >= 0, sum(alpha) <= budget}`; the multiplier is found by a
/// log-scale bisection (`sum(alpha)` decreases in `lambda`).
pub fn solve_p1_closed_form_budget(coef: &P1Coefficients, budget: f64) -> Result<P1Solution> {
    let k = coef.users();
    if budget <= 0.0 || coef.a.iter().all(|a| *a == 0.0) {
        return Ok(P1Solution {
            alpha: AttackVector::zeros(k),
            lambda: 0.0,
        });
    }
    let a_max = coef.a.iter().copied().fold(0.0, f64::max);
    let a_min = coef.a.iter().copied().fold(f64::INFINITY, f64::min);
    let b_min = coef.b.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = a_max / (b_min * (a_min + b_min)) + 1.0;
    let mut lo = 1e-12_f64.min(hi * 0.5);
    let total = |lambda: f64| -> f64 { closed_form_alpha(coef, lambda).iter().sum() };

    while total(lo) < budget {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::BracketFailure(format!(
                "sum(alpha) stays below {budget} for every lambda >= 1e-300 (A_max={a_max:e}, B_min={b_min:e})"
            )));
        }
    }
    if total(hi) > budget {
        return Err(Error::BracketFailure(format!(
            "sum(alpha) = {} > {budget} at the upper bracket {hi:e}",
            total(hi)
        )));
    }
    let tol = 1e-10 * budget.max(1.0);
    let mut lambda = hi;
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        let s = total(mid);
        lambda = mid;
        if (s - budget).abs() < tol {
            break;
        }
        if s > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            lambda = hi;
            break;
        }
    }
    let mut alpha = closed_form_alpha(coef, lambda);
    let s: f64 = alpha.iter().sum();
    if s > budget {
        alpha.iter_mut().for_each(|x| *x *= budget / s);
    }
    Ok(P1Solution {
        alpha: AttackVector::with_budget(alpha, budget)?,
        lambda,
    })
}

/// Projected-gradient minimizer of a smooth objective over
/// `{alpha >= 0, sum(alpha) <= budget}`.
pub fn solve_simplex<F: SmoothObjective + ?Sized>(
    objective: &F,
    budget: f64,
    x0: Option<&[f64]>,
    opts: PgOptions,
) -> Result<PgResult> {
    let k = objective.dim();
    let start = match x0 {
        Some(x) => x.to_vec(),
        None => vec![budget / k as f64; k],
    };
    projected_gradient(objective, &start, |y| project_capped_simplex(y, budget), opts)
}

/// Numerical attack for any convex objective on the unit simplex; used as
/// an oracle for the closed form and as the inner engine of the
/// distance-uncertain problem.
pub fn solve_p1_numeric<F: SmoothObjective + ?Sized>(objective: &F, users: usize) -> Result<AttackVector> {
    if objective.dim() != users {
        return Err(Error::InvalidArgument(format!(
            "objective has dimension {}, expected {users}",
            objective.dim()
        )));
    }
    let r = solve_simplex(objective, 1.0, None, PgOptions::default())?;
    AttackVector::new(r.x)
}

/// Expected sum-rate over random user and attacker distances, discretized
/// with Simpson's rule on each annulus.
#[derive(Debug, Clone)]
pub struct ExpectedSumRate {
    /// Per-user `(Pd_k M, u_k, 1/(P_k L))`.
    users: Vec<(f64, f64, f64)>,
    /// `(weight, theta(x))` on the user annulus.
    user_nodes: Vec<(f64, f64)>,
    /// `(weight, theta(y))` on the attacker annulus.
    attacker_nodes: Vec<(f64, f64)>,
}

impl ExpectedSumRate {
    pub fn new(cfg: &SystemConfig, pa: &PowerAllocation, grid_n: usize) -> Result<Self> {
        let theta = |d: f64| cfg.path_loss_const * d.powf(-cfg.path_loss_exp);
        let users_law = DistanceLaw::annulus(cfg.d_min, cfg.d_max, grid_n)?;
        let att_law = DistanceLaw::annulus(cfg.d_min, cfg.d_max_attacker, grid_n)?;
        let m = cfg.antennas as f64;
        Ok(Self {
            users: (0..cfg.users)
                .map(|k| (pa[k] * m, cfg.power_ratio(k), cfg.estimation_noise(k)))
                .collect(),
            user_nodes: users_law
                .nodes
                .iter()
                .zip(&users_law.weights)
                .map(|(x, w)| (*w, theta(*x)))
                .collect(),
            attacker_nodes: att_law
                .nodes
                .iter()
                .zip(&att_law.weights)
                .map(|(y, w)| (*w, theta(*y)))
                .collect(),
        })
    }

    fn user_term(&self, k: usize, alpha_k: f64) -> (f64, f64) {
        let (pm, u, noise) = self.users[k];
        let mut value = 0.0;
        let mut deriv = 0.0;
        for &(wy, ty) in &self.attacker_nodes {
            let jam = alpha_k * u * ty;
            for &(wx, tx) in &self.user_nodes {
                let w = wx * wy;
                let signal = pm * tx * tx;
                let phi = tx + jam + noise;
                value += w * (signal / phi).ln_1p();
                deriv -= w * signal * u * ty / (phi * (phi + signal));
            }
        }
        (value / LN_2, deriv / LN_2)
    }
}

impl SmoothObjective for ExpectedSumRate {
    fn dim(&self) -> usize {
        self.users.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (0..self.dim()).map(|k| self.user_term(k, x[k]).0).sum()
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.user_term(k, x[k]).1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct P2Solution {
    pub alpha: AttackVector,
    /// Expected sum-rate at `alpha` (bit/s/Hz).
    pub objective: f64,
}

/// Attack that minimizes the expected sum-rate when only the distance
/// distributions are known.
pub fn solve_p2(cfg: &SystemConfig, pa: &PowerAllocation, grid_n: usize) -> Result<P2Solution> {
    if grid_n < 8 || grid_n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Simpson grid must be even and at least 8, got {grid_n}"
        )));
    }
    if cfg.attacker_power <= 0.0 {
        let obj = ExpectedSumRate::new(cfg, pa, grid_n)?;
        let zero = vec![0.0; cfg.users];
        return Ok(P2Solution {
            objective: obj.value(&zero),
            alpha: AttackVector::zeros(cfg.users),
        });
    }
    let obj = ExpectedSumRate::new(cfg, pa, grid_n)?;
    let alpha = solve_p1_numeric(&obj, cfg.users)?;
    Ok(P2Solution {
        objective: obj.value(alpha.as_slice()),
        alpha,
    })
}

/// Default Simpson grid for the distance expectation.
pub const DEFAULT_GRID: usize = 64;

/// Water levels `phi_k / (M theta_k^2)` of the BS power allocation.
pub fn water_levels(ls: &LargeScale, attack: &AttackVector, cfg: &SystemConfig) -> Vec<f64> {
    let m = cfg.antennas as f64;
    crate::rates::effective_noise(ls, attack, cfg)
        .iter()
        .zip(&ls.user_gain)
        .map(|(phi, theta)| phi / (m * theta * theta))
        .collect()
}

/// `[eta - level_k]^+` with `eta` bisected so the powers sum to `budget`.
pub fn water_fill(levels: &[f64], budget: f64) -> Vec<f64> {
    let fill = |eta: f64| -> f64 { levels.iter().map(|l| (eta - l).max(0.0)).sum() };
    let mut lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = lo + budget;
    // the lowest level alone reaches the budget at lo + budget
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fill(mid) > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut p: Vec<f64> = levels.iter().map(|l| (lo - l).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        // remove bisection slack so the budget is met exactly
        let scale = budget / s;
        if (scale - 1.0).abs() < 1e-9 {
            p.iter_mut().for_each(|x| *x *= scale);
        }
    }
    p
}

/// Sum-rate-maximizing BS power allocation against a given attack.
pub fn water_filling(ls: &LargeScale, attack: &AttackVector, cfg: &SystemConfig) -> PowerAllocation {
    PowerAllocation::from_raw(water_fill(&water_levels(ls, attack, cfg), cfg.bs_power))
}

/// Asymptotic sum-rate `R_sum(Pd, alpha)`.
pub fn game_value(ls: &LargeScale, alpha: &AttackVector, pa: &PowerAllocation, cfg: &SystemConfig) -> f64 {
    asymptotic_rates(ls, alpha, pa, cfg).sum_rate
}

/// Attacker best response to a BS allocation.
pub fn attacker_best_response(ls: &LargeScale, pa: &PowerAllocation, cfg: &SystemConfig) -> Result<AttackVector> {
    if cfg.attacker_power <= 0.0 {
        return Ok(AttackVector::zeros(ls.users()));
    }
    Ok(solve_p1_closed_form(&P1Coefficients::from_gains(ls, pa, cfg)?)?.alpha)
}

#[derive(Debug, Clone)]
pub struct GameState {
    pub alpha: AttackVector,
    pub power: PowerAllocation,
    pub iterations: usize,
    /// `R_sum(power, alpha)` at the returned point, with `power` the BS
    /// best response to `alpha`.
    pub value: f64,
    /// Certified distance to the saddle value:
    /// `max_P R_sum(P, alpha) - min_a R_sum(power, a) >= 0`.
    pub duality_gap: f64,
    /// Game value after each round.
    pub trace: Vec<f64>,
}

pub const GAME_TOL: f64 = 1e-4;
pub const GAME_MAX_ITER: usize = 100;

/// Golden-section tolerance of the relaxation step.
const RELAX_TOL: f64 = 1e-4;

/// Gauss-Seidel iteration between the BS (water-filling, maximizer) and the
/// attacker (closed-form best response, minimizer), started from the
/// attack-free state.
///
/// Plain alternation of best responses may cycle in this zero-sum game, so
/// each attacker move is relaxed: the new attack is the point on the
/// segment towards the best response that minimizes the BS-best-response
/// value `V(a) = max_P R_sum(P, a)`. That direction is a descent direction of
/// the convex `V`, so the value sequence is non-increasing. Stops when the
/// relative change of the value over one round is at most `tol`.
pub fn solve_p3_gauss_seidel(cfg: &SystemConfig, topo: &Topology, tol: f64, max_iter: usize) -> Result<GameState> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let ls = LargeScale::from_topology(topo, cfg)?;
    let k = cfg.users;
    let bs_value = |a: &[f64]| -> Result<(f64, PowerAllocation)> {
        let a = AttackVector::new(a.to_vec())?;
        let p = water_filling(&ls, &a, cfg);
        Ok((game_value(&ls, &a, &p, cfg), p))
    };
    let mut alpha = vec![0.0; k];
    let (mut value, mut power) = bs_value(&alpha)?;
    let mut trace = Vec::new();
    for iter in 1..=max_iter {
        let target = attacker_best_response(&ls, &power, cfg)?;
        let seg = |r: f64| -> Vec<f64> {
            alpha
                .iter()
                .zip(target.as_slice())
                .map(|(a, b)| (a + r * (b - a)).max(0.0))
                .collect()
        };
        let step = golden_min(|r| bs_value(&seg(r)).map(|v| v.0).unwrap_or(f64::INFINITY), RELAX_TOL);
        let cand = seg(step);
        let (v, p) = bs_value(&cand)?;
        let previous = value;
        if v < value {
            alpha = cand;
            value = v;
            power = p;
        }
        trace.push(value);
        if (previous - value).abs() <= tol * value.abs() {
            let alpha = AttackVector::new(alpha)?;
            let lower = game_value(&ls, &attacker_best_response(&ls, &power, cfg)?, &power, cfg);
            return Ok(GameState {
                alpha,
                power,
                iterations: iter,
                value,
                duality_gap: (value - lower).max(0.0),
                trace,
            });
        }
    }
    Err(Error::NonConvergence {
        solver: "Gauss-Seidel",
        iterations: max_iter,
        residual: trace
            .windows(2)
            .last()
            .map(|w| (w[1] - w[0]).abs() / w[1].abs())
            .unwrap_or(f64::NAN),
        trace,
    })
}

/// Minimizer over `[0, 1]` of a unimodal function by golden-section search;
/// the endpoint `1` is also considered.
fn golden_min<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(1.0) < f(mid) {
        1.0
    } else {
        mid
    }
}

/// Largest gains either player obtains from `deviations` random unilateral
/// deviations away from `state`: `(BS gain, attacker gain)`, both as
/// non-negative sum-rate improvements for the deviating player.
pub fn unilateral_gains(
    ls: &LargeScale,
    cfg: &SystemConfig,
    state: &GameState,
    deviations: usize,
    rng: &mut SimRng,
) -> (f64, f64) {
    let k = cfg.users;
    let mut bs_gain: f64 = 0.0;
    let mut att_gain: f64 = 0.0;
    for _ in 0..deviations {
        let p = random_simplex_point(rng, k, cfg.bs_power);
        let v = game_value(ls, &state.alpha, &PowerAllocation::from_raw(p), cfg);
        bs_gain = bs_gain.max(v - state.value);
        let a = random_simplex_point(rng, k, 1.0);
        let v = game_value(ls, &AttackVector::new(a).expect("feasible"), &state.power, cfg);
        att_gain = att_gain.max(state.value - v);
    }
    (bs_gain, att_gain)
}

/// Random point of `{x >= 0, sum(x) <= budget}`: uniform on the face
/// `sum = budget`, then scaled by `U^(1/k)` half of the time.
pub fn random_simplex_point(rng: &mut SimRng, k: usize, budget: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    let shrink = if rng.random::<bool>() {
        rng.random::<f64>().powf(1.0 / k as f64)
    } else {
        1.0
    };
    e.iter().map(|x| budget * shrink * x / s).collect()
}

#[derive(Debug, Clone, Copy)]
pub enum PowerStrategy {
    /// `P_A / K` per user.
    Uniform,
}

impl PowerStrategy {
    pub fn allocate(&self, cfg: &SystemConfig) -> PowerAllocation {
        match self {
            PowerStrategy::Uniform => PowerAllocation::uniform(cfg.users, cfg.bs_power),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvpiEstimate {
    /// Monte Carlo mean of `R_sum(alpha_dist) - R_sum(alpha_topo)` (bit/s/Hz).
    pub evpi: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Expected value of perfect topology information to the attacker: the
/// sum-rate gap between the distribution-only attack (fixed across
/// topologies) and the per-topology optimal attack.
pub fn evpi(
    cfg: &SystemConfig,
    strategy: PowerStrategy,
    n_topologies: usize,
    rng: &mut SimRng,
    grid_n: usize,
) -> Result<EvpiEstimate> {
    if n_topologies == 0 {
        return Err(Error::InvalidArgument("EVPI needs at least one topology".into()));
    }
    let pa = strategy.allocate(cfg);
    let blind = solve_p2(cfg, &pa, grid_n)?.alpha;
    let mut diffs = Vec::with_capacity(n_topologies);
    for _ in 0..n_topologies {
        let topo = sample_topology(rng, cfg);
        let ls = LargeScale::from_topology(&topo, cfg)?;
        let informed = attacker_best_response(&ls, &pa, cfg)?;
        diffs.push(game_value(&ls, &blind, &pa, cfg) - game_value(&ls, &informed, &pa, cfg));
    }
    let (mean, stderr) = crate::stats::mean_stderr(&diffs);
    Ok(EvpiEstimate {
        evpi: mean,
        stderr,
        samples: n_topologies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::units::{paper_config, Scale};
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn instance(seed: u64) -> (SystemConfig, Topology, LargeScale, PowerAllocation) {
        let mut cfg = paper_config(Scale::Desk);
        cfg.d_max_attacker = 250.0;
        let topo = sample_topology(&mut seeded(seed), &cfg);
        let ls = LargeScale::from_topology(&topo, &cfg).unwrap();
        let pa = PowerAllocation::uniform(cfg.users, cfg.bs_power);
        (cfg, topo, ls, pa)
    }

    #[test]
    fn lone_user_takes_the_whole_budget() {
        let coef = P1Coefficients::new(vec![3.0], vec![0.5]).unwrap();
        let sol = solve_p1_closed_form(&coef).unwrap();
        assert!((sol.alpha[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_users_share_equally() {
        let coef = P1Coefficients::new(vec![40.0; 6], vec![0.2; 6]).unwrap();
        let sol = solve_p1_closed_form(&coef).unwrap();
        for a in sol.alpha.as_slice() {
            assert!((a - 1.0 / 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_generalization_spends_the_budget() {
        let (cfg, _, ls, pa) = instance(4);
        let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
        let sol = solve_p1_closed_form_budget(&coef, 2.0).unwrap();
        assert!((sol.alpha.total() - 2.0).abs() < 1e-9);
        let one = solve_p1_closed_form(&coef).unwrap();
        assert!(coef.objective(sol.alpha.as_slice()) < coef.objective(one.alpha.as_slice()));
    }

    #[test]
    fn stable_root_matches_the_textbook_form() {
        for &(a, b, l) in &[(5.0, 0.1, 0.3), (1e6, 2.0, 1e-3), (0.5, 0.01, 10.0)] {
            let naive = (((a * (a + 4.0 / l)) as f64).sqrt() - a - 2.0 * b) / 2.0;
            assert!((alpha_at(a, b, l) - naive.max(0.0)).abs() <= 1e-9 * (1.0 + naive.abs()));
        }
    }

    #[test]
    fn invalid_coefficients_are_rejected() {
        assert!(P1Coefficients::new(vec![1.0], vec![0.0]).is_err());
        assert!(P1Coefficients::new(vec![-1.0], vec![1.0]).is_err());
        assert!(P1Coefficients::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(P1Coefficients::new(vec![], vec![]).is_err());
    }

    #[test]
    fn silent_attacker_has_no_coefficients() {
        let (mut cfg, _, ls, pa) = instance(1);
        cfg.attacker_power = 0.0;
        assert!(P1Coefficients::from_gains(&ls, &pa, &cfg).is_err());
        assert_eq!(attacker_best_response(&ls, &pa, &cfg).unwrap().total(), 0.0);
    }

    #[test]
    fn closed_form_satisfies_kkt() {
        for seed in 0..20 {
            let (cfg, _, ls, pa) = instance(seed);
            let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
            let sol = solve_p1_closed_form(&coef).unwrap();
            for k in 0..cfg.users {
                let d = coef.marginal(k, sol.alpha[k]);
                if sol.alpha[k] > 0.0 {
                    assert!((d / sol.lambda - 1.0).abs() < 1e-8, "seed {seed} user {k}");
                } else {
                    assert!(d <= sol.lambda * (1.0 + 1e-8));
                }
            }
        }
    }

    #[test]
    fn budget_sum_decreases_in_lambda() {
        let (cfg, _, ls, pa) = instance(9);
        let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let lambda = 10f64.powf(-12.0 + 0.25 * i as f64);
            let s: f64 = closed_form_alpha(&coef, lambda).iter().sum();
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn closed_form_beats_random_attacks() {
        let (cfg, _, ls, pa) = instance(2);
        let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
        let best = coef.objective(solve_p1_closed_form(&coef).unwrap().alpha.as_slice());
        let mut rng = seeded(99);
        for _ in 0..1000 {
            let a = random_simplex_point(&mut rng, cfg.users, 1.0);
            assert!(coef.objective(&a) >= best - 1e-12);
        }
    }

    struct Linear(Vec<f64>);

    impl SmoothObjective for Linear {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            self.0.iter().zip(x).map(|(c, x)| c * x).sum()
        }
        fn gradient(&self, _x: &[f64], g: &mut [f64]) {
            g.copy_from_slice(&self.0);
        }
    }

    #[test]
    fn numeric_solver_finds_the_steepest_vertex() {
        let a = solve_p1_numeric(&Linear(vec![-1.0, -3.0, -2.0]), 3).unwrap();
        assert!((a[1] - 1.0).abs() < 1e-8 && a[0].abs() < 1e-8 && a[2].abs() < 1e-8);
        assert!(solve_p1_numeric(&Linear(vec![1.0]), 2).is_err());
    }

    #[test]
    fn numeric_and_closed_form_agree() {
        let (cfg, _, ls, pa) = instance(5);
        let c5 = cfg.with_users(5);
        let coef = P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap();
        let coef = P1Coefficients::new(coef.a[..5].to_vec(), coef.b[..5].to_vec()).unwrap();
        let cf = solve_p1_closed_form(&coef).unwrap().alpha;
        let nm = solve_p1_numeric(&coef, c5.users).unwrap();
        let (f1, f2) = (coef.objective(cf.as_slice()), coef.objective(nm.as_slice()));
        assert!((f1 - f2).abs() <= 1e-6 * f1.abs());
        for k in 0..5 {
            assert!((cf[k] - nm[k]).abs() < 1e-4);
        }
    }

    #[test]
    fn distribution_attack_is_uniform_for_identical_users() {
        let (cfg, _, _, pa) = instance(0);
        let sol = solve_p2(&cfg, &pa, DEFAULT_GRID).unwrap();
        for a in sol.alpha.as_slice() {
            assert!((a - 0.1).abs() < 1e-6);
        }
    }

    #[test]
    fn simpson_grid_has_converged() {
        let (cfg, _, _, pa) = instance(0);
        let alpha = vec![0.1; cfg.users];
        let coarse = ExpectedSumRate::new(&cfg, &pa, 16).unwrap().value(&alpha);
        let fine = ExpectedSumRate::new(&cfg, &pa, 32).unwrap().value(&alpha);
        assert!((coarse - fine).abs() < 1e-4 * fine);
        assert!(solve_p2(&cfg, &pa, 15).is_err());
        assert!(solve_p2(&cfg, &pa, 6).is_err());
    }

    #[test]
    fn degenerate_distances_reduce_to_the_closed_form() {
        let (mut cfg, _, _, _) = instance(0);
        cfg.d_min = 200.0;
        cfg.d_max = 200.0;
        cfg.d_max_attacker = 200.0;
        let pa = PowerAllocation::new((1..=10).map(|i| i as f64 / 55.0 * cfg.bs_power).collect(), cfg.bs_power).unwrap();
        let p2 = solve_p2(&cfg, &pa, 8).unwrap();
        let ls = LargeScale::from_topology(&Topology::new(vec![200.0; 10], 200.0), &cfg).unwrap();
        let p1 = solve_p1_closed_form(&P1Coefficients::from_gains(&ls, &pa, &cfg).unwrap()).unwrap();
        for k in 0..10 {
            assert!((p2.alpha[k] - p1.alpha[k]).abs() < 1e-5);
        }
        let e = evpi(&cfg, PowerStrategy::Uniform, 20, &mut seeded(1), 8).unwrap();
        assert!(e.evpi.abs() < 1e-9);
    }

    #[test]
    fn evpi_needs_topologies_and_is_not_negative() {
        let (cfg, _, _, _) = instance(0);
        assert!(evpi(&cfg, PowerStrategy::Uniform, 0, &mut seeded(1), 16).is_err());
        let e = evpi(&cfg, PowerStrategy::Uniform, 100, &mut seeded(1), 16).unwrap();
        assert!(e.evpi >= -2.0 * e.stderr);
        assert_eq!(e.samples, 100);
    }

    #[test]
    fn water_filling_equalizes_identical_users() {
        let cfg = paper_config(Scale::Desk);
        let ls = LargeScale::from_topology(&Topology::new(vec![300.0; 10], 120.0), &cfg).unwrap();
        let p = water_filling(&ls, &AttackVector::uniform(10), &cfg);
        for k in 0..10 {
            assert!((p[k] / (cfg.bs_power / 10.0) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn water_filling_cuts_off_weak_levels() {
        let p = water_fill(&[1.0, 10.0], 5.0);
        assert_eq!(p[1], 0.0);
        assert!((p[0] - 5.0).abs() < 1e-9);
        // a level exactly at the water line gets nothing
        let p = water_fill(&[0.0, 2.0], 2.0);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn water_filling_beats_random_allocations() {
        let (cfg, _, ls, _) = instance(12);
        let a = AttackVector::uniform(cfg.users);
        let p = water_filling(&ls, &a, &cfg);
        assert!((p.total() / cfg.bs_power - 1.0).abs() < 1e-9);
        let best = game_value(&ls, &a, &p, &cfg);
        let mut rng = seeded(4);
        for _ in 0..1000 {
            let q = PowerAllocation::from_raw(random_simplex_point(&mut rng, cfg.users, cfg.bs_power));
            assert!(game_value(&ls, &a, &q, &cfg) <= best + 1e-9);
        }
    }

    #[test]
    fn game_without_attacker_is_plain_water_filling() {
        let (mut cfg, topo, ls, _) = instance(3);
        cfg.attacker_power = 0.0;
        let g = solve_p3_gauss_seidel(&cfg, &topo, GAME_TOL, GAME_MAX_ITER).unwrap();
        assert_eq!(g.iterations, 1);
        assert_eq!(g.power, water_filling(&ls, &AttackVector::zeros(cfg.users), &cfg));
        assert!(solve_p3_gauss_seidel(&cfg, &topo, 0.0, 10).is_err());
    }

    #[test]
    fn game_reaches_a_saddle_point() {
        for seed in 0..10 {
            let (cfg, topo, ls, _) = instance(seed);
            let g = solve_p3_gauss_seidel(&cfg, &topo, GAME_TOL, GAME_MAX_ITER).unwrap();
            assert!(g.trace.windows(2).all(|w| w[1] <= w[0]));
            let (bs, att) = unilateral_gains(&ls, &cfg, &g, 100, &mut seeded(seed));
            assert!(bs <= GAME_TOL * g.value && att <= GAME_TOL * g.value);
            assert!(g.duality_gap >= 0.0);
        }
    }

    #[test]
    fn game_reports_non_convergence_with_trace() {
        let (cfg, topo, _, _) = instance(0);
        match solve_p3_gauss_seidel(&cfg, &topo, 1e-300, 2) {
            Err(Error::NonConvergence { iterations, trace, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(trace.len(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn closed_form_is_feasible_and_optimal(
            a in proptest::collection::vec(1e-3f64..1e4, 2..8),
            b in proptest::collection::vec(1e-4f64..10.0, 8),
        ) {
            let b = b[..a.len()].to_vec();
            let coef = P1Coefficients::new(a, b).unwrap();
            let sol = solve_p1_closed_form(&coef).unwrap();
            prop_assert!((sol.alpha.total() - 1.0).abs() < 1e-9);
            let oracle = solve_p1_numeric(&coef, coef.users()).unwrap();
            let (f1, f2) = (coef.objective(sol.alpha.as_slice()), coef.objective(oracle.as_slice()));
            prop_assert!(f1 <= f2 + 1e-6 * f2.abs().max(1e-12));
        }

        #[test]
        fn water_filling_meets_the_budget(levels in proptest::collection::vec(0.0f64..100.0, 1..12), budget in 0.1f64..1e3) {
            let p = water_fill(&levels, budget);
            prop_assert!((p.iter().sum::<f64>() / budget - 1.0).abs() < 1e-9);
            // all active users share the same water line
            let line: Vec<f64> = p.iter().zip(&levels).filter(|(p, _)| **p > 0.0).map(|(p, l)| p + l).collect();
            for w in &line {
                prop_assert!((w - line[0]).abs() <= 1e-9 * line[0].abs().max(1.0));
            }
        }
    }
}
