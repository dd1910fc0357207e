//! Projected-gradient machinery shared by the attack solvers.
//!
//! The solver is a spectral (Barzilai-Borwein) projected gradient with a
//! non-monotone Armijo backtracking search; feasibility is maintained by an
//! exact Euclidean projection supplied by the caller.

use crate::error::{Error, Result};

/// A differentiable objective on `R^n`.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct PgOptions {
    /// Stop when `|x - P(x - grad f(x))|_2` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Length of the non-monotone reference window.
    pub memory: usize,
}

impl Default for PgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
            armijo: 1e-4,
            memory: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PgResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub pg_norm: f64,
}

const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn pg_norm<P: Fn(&[f64]) -> Vec<f64>>(x: &[f64], g: &[f64], project: &P) -> f64 {
    let trial: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - gi).collect();
    let p = project(&trial);
    norm2(&x.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>())
}

/// Minimizes `objective` over the convex set whose projection is `project`,
/// starting from `project(x0)`.
pub fn projected_gradient<F, P>(objective: &F, x0: &[f64], project: P, opts: PgOptions) -> Result<PgResult>
where
    F: SmoothObjective + ?Sized,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let n = objective.dim();
    let mut x = project(x0);
    let mut f = objective.value(&x);
    let mut g = vec![0.0; n];
    objective.gradient(&x, &mut g);
    let mut history = vec![f];
    let mut trace = Vec::new();

    let mut res = pg_norm(&x, &g, &project);
    let ginf = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut step = if ginf > 0.0 { (1.0 / ginf).clamp(STEP_MIN, STEP_MAX) } else { 1.0 };

    let mut g_new = vec![0.0; n];
    for iter in 0..opts.max_iter {
        if res < opts.tol {
            return Ok(PgResult {
                x,
                value: f,
                iterations: iter,
                pg_norm: res,
            });
        }
        if iter % 64 == 0 {
            trace.push(res);
        }
        let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
        let d: Vec<f64> = project(&trial).iter().zip(&x).map(|(p, xi)| p - xi).collect();
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let f_ref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // values that agree to rounding are not a failed decrease
        let noise = 64.0 * f64::EPSILON * f_ref.abs().max(1.0);

        let mut t = 1.0;
        let (x_new, f_new) = loop {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            let fc = objective.value(&cand);
            if fc <= f_ref + opts.armijo * t * slope + noise || t < 1e-20 {
                break (cand, fc);
            }
            t *= 0.5;
        };

        objective.gradient(&x_new, &mut g_new);
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..n {
            let s = x_new[i] - x[i];
            let y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX.min(step * 10.0) };

        x = x_new;
        f = f_new;
        std::mem::swap(&mut g, &mut g_new);
        history.push(f);
        if history.len() > opts.memory.max(1) {
            history.remove(0);
        }
        res = pg_norm(&x, &g, &project);
    }
    if res < opts.tol {
        return Ok(PgResult {
            x,
            value: f,
            iterations: opts.max_iter,
            pg_norm: res,
        });
    }
    trace.push(res);
    Err(Error::NonConvergence {
        solver: "projected gradient",
        iterations: opts.max_iter,
        residual: res,
        trace,
    })
}

/// Threshold `tau >= 0` such that `sum(max(y - tau, 0)) = budget`, or zero
/// when the positive part of `y` already fits the budget.
pub fn simplex_threshold(y: &[f64], budget: f64) -> f64 {
    let positive: f64 = y.iter().map(|v| v.max(0.0)).sum();
    if positive <= budget {
        return 0.0;
    }
    if budget <= 0.0 {
        return y.iter().copied().fold(0.0, f64::max);
    }
    let mut sorted: Vec<f64> = y.iter().copied().filter(|v| *v > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        cum += v;
        let cand = (cum - budget) / (i + 1) as f64;
        if *v - cand > 0.0 {
            tau = cand;
        } else {
            break;
        }
    }
    tau.max(0.0)
}

/// Euclidean projection onto `{x >= 0, sum(x) <= budget}`.
pub fn project_capped_simplex(y: &[f64], budget: f64) -> Vec<f64> {
    let tau = simplex_threshold(y, budget.max(0.0));
    y.iter().map(|v| (v - tau).max(0.0)).collect()
}
