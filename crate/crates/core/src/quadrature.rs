//! Equal-weight quadrature for one period of a periodic function.
//!
//! With `n` equally spaced abscissae over one period, the rectangle rule
//! integrates `cos(kx)` and `sin(kx)` exactly (to roundoff) for every
//! `|k| < n`. Every integrand in this crate is a trigonometric polynomial
//! of low degree in `ωt` and `θ`, so a fixed node count gives the exact
//! one-period mean rather than an approximation with a tunable error.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Nodes used for averages over time.
///
/// Time integrands are products of a density and an absorption
/// probability (degree 2); the averaging-order comparison squares a
/// degree-2 function (degree 4). Sixteen nodes is exact through degree 15.
pub const TIME_NODES: usize = 16;

/// Nodes used for averages over the hidden phase θ.
///
/// Moments over θ square degree-1 intensities; 64 nodes keeps the
/// non-smooth (absolute-value) regime of the alternative detector models
/// well resolved too.
pub const THETA_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicRule {
    nodes: usize,
}

impl PeriodicRule {
    pub const fn new(nodes: usize) -> Self {
        assert!(nodes > 0, "a periodic rule needs at least one node");
        Self { nodes }
    }

    pub const fn nodes(&self) -> usize {
        self.nodes
    }

    /// Abscissae `k·period/n` for `k = 0..n`.
    pub fn abscissae(&self, period: f64) -> impl Iterator<Item = f64> + '_ {
        let n = self.nodes;
        (0..n).map(move |k| period * k as f64 / n as f64)
    }

    /// One-period mean of `f`.
    pub fn mean<F: FnMut(f64) -> f64>(&self, period: f64, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for x in self.abscissae(period) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { at: x });
            }
            sum += v;
        }
        Ok(sum / self.nodes as f64)
    }

    /// Like [`mean`](Self::mean) for fallible integrands.
    pub fn try_mean<F: FnMut(f64) -> Result<f64>>(&self, period: f64, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for x in self.abscissae(period) {
            let v = f(x)?;
            if !v.is_finite() {
                return Err(Error::NonFinite { at: x });
            }
            sum += v;
        }
        Ok(sum / self.nodes as f64)
    }

    /// Samples `f` at every abscissa.
    pub fn sample<F: FnMut(f64) -> Result<f64>>(&self, period: f64, mut f: F) -> Result<Vec<f64>> {
        self.abscissae(period)
            .map(|x| {
                let v = f(x)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { at: x })
                }
            })
            .collect()
    }
}

/// Period of a signal with angular frequency `omega`.
pub fn period(omega: f64) -> f64 {
    TAU / omega
}

/// Mean of node values (uniform weights).
pub fn node_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Two-pass variance of node values under uniform weights.
pub fn node_variance(values: &[f64]) -> f64 {
    let m = node_mean(values);
    node_mean_by(values, |v| (v - m) * (v - m))
}

/// Two-pass covariance of paired node values under uniform weights.
pub fn node_covariance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let ma = node_mean(a);
    let mb = node_mean(b);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / a.len() as f64
}

fn node_mean_by(values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    values.iter().map(|&v| f(v)).sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_trig_polynomials() {
        let rule = PeriodicRule::new(TIME_NODES);
        for k in 1..TIME_NODES {
            let c = rule.mean(TAU, |x| (k as f64 * x).cos()).unwrap();
            let s = rule.mean(TAU, |x| (k as f64 * x).sin()).unwrap();
            assert!(c.abs() < 1e-14, "cos({k}x) mean {c}");
            assert!(s.abs() < 1e-14, "sin({k}x) mean {s}");
        }
        // aliasing starts at k = n
        let c = rule.mean(TAU, |x| (TIME_NODES as f64 * x).cos()).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let rule = PeriodicRule::new(4);
        let err = rule
            .mean(TAU, |x| if x > 1.0 { f64::NAN } else { 0.0 })
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn node_moments() {
        let a = [1.0, -1.0, 1.0, -1.0];
        let b = [2.0, -2.0, 2.0, -2.0];
        assert_eq!(node_mean(&a), 0.0);
        assert_eq!(node_variance(&a), 1.0);
        assert_eq!(node_covariance(&a, &b), 2.0);
    }
}
