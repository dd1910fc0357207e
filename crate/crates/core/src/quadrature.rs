//! Composite Simpson rules used to evaluate expectations over random
//! BS-user and BS-attacker distances.

use crate::error::{Error, Result};

/// Nodes and weights of the composite Simpson rule with `intervals`
/// (even) sub-intervals on `[lo, hi]`.
pub fn simpson_rule(lo: f64, hi: f64, intervals: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if intervals < 2 || intervals % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Simpson's rule needs an even number of intervals, got {intervals}"
        )));
    }
    let h = (hi - lo) / intervals as f64;
    let nodes = (0..=intervals).map(|i| lo + h * i as f64).collect();
    let weights = (0..=intervals)
        .map(|i| {
            let c = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

/// Discretized law of a radius uniform over an annulus. Simpson's rule is
/// applied in `v = sqrt(x)`, which clusters nodes where the `x^-gamma`
/// path-loss terms vary fastest: `w_i ~ simpson_i * 4 v_i^3 / (outer^2 - inner^2)`.
/// A zero-width annulus collapses to a point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceLaw {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DistanceLaw {
    pub fn annulus(inner: f64, outer: f64, intervals: usize) -> Result<Self> {
        if outer <= inner {
            // still validate the grid argument
            simpson_rule(0.0, 1.0, intervals)?;
            return Ok(Self {
                nodes: vec![inner],
                weights: vec![1.0],
            });
        }
        if inner < 0.0 {
            return Err(Error::Domain(format!("annulus inner radius must be non-negative, got {inner}")));
        }
        let (vs, w) = simpson_rule(inner.sqrt(), outer.sqrt(), intervals)?;
        let norm = outer * outer - inner * inner;
        let nodes: Vec<f64> = vs.iter().map(|v| v * v).collect();
        // density 2x/norm times dx/dv = 2v
        let weights = vs
            .iter()
            .zip(&w)
            .map(|(v, wi)| wi * 4.0 * v.powi(3) / norm)
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}
