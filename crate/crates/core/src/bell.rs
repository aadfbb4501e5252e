//! CHSH statistics over a correlation function of the two coherent phases.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::reduce_phase;

/// Local-realist bound on `|s|`.
pub const CHSH_BOUND: f64 = 2.0;

/// Smallest grid accepted by [`find_max_violation`].
pub const MIN_GRID: usize = 8;

/// Correlation predicted by the time-averaged intensities, `−sin(θi − θj)`.
pub fn analytic_correlation(theta_i: f64, theta_j: f64) -> f64 {
    -(theta_i - theta_j).sin()
}

/// Covariance of the ±1 counts implied by conditional independence,
/// `−½ sin(θi − θj)`.
pub fn count_correlation(theta_i: f64, theta_j: f64) -> f64 {
    -0.5 * (theta_i - theta_j).sin()
}

/// Two phases per side: `a`, `a′` for θi and `b`, `b′` for θj.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSetting {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Self {
            a: reduce_phase(a),
            a_prime: reduce_phase(a_prime),
            b: reduce_phase(b),
            b_prime: reduce_phase(b_prime),
        }
    }

    /// `(0, π/2, 3π/4, π/4)`, which reaches `2√2` for `−sin` correlations.
    pub fn maximal() -> Self {
        Self::new(0.0, FRAC_PI_2, 3.0 * FRAC_PI_4, FRAC_PI_4)
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self::new(
            self.a + offset,
            self.a_prime + offset,
            self.b + offset,
            self.b_prime + offset,
        )
    }
}

impl Default for ChshSetting {
    fn default() -> Self {
        Self::maximal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    /// `E(a,b)`, `E(a,b′)`, `E(a′,b)`, `E(a′,b′)`.
    pub terms: [f64; 4],
    pub s: f64,
    pub violated: bool,
}

impl ChshResult {
    pub fn from_terms(terms: [f64; 4]) -> Self {
        let s = terms[0] + terms[1] + terms[2] - terms[3];
        Self {
            terms,
            s,
            violated: s.abs() > CHSH_BOUND,
        }
    }
}

pub fn chsh_statistic<F>(setting: &ChshSetting, corr: F) -> Result<ChshResult>
where
    F: Fn(f64, f64) -> f64,
{
    let pairs = [
        (setting.a, setting.b),
        (setting.a, setting.b_prime),
        (setting.a_prime, setting.b),
        (setting.a_prime, setting.b_prime),
    ];
    let mut terms = [0.0; 4];
    for (term, (x, y)) in terms.iter_mut().zip(pairs) {
        let v = corr(x, y);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        *term = v;
    }
    Ok(ChshResult::from_terms(terms))
}

/// Correlation values on the `grid × grid` lattice of phases `k·2π/grid`.
///
/// `values[i * grid + j]` holds `E(θi = phase(i), θj = phase(j))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub grid: usize,
    pub values: Vec<f64>,
}

impl CorrelationTable {
    pub fn phase(grid: usize, index: usize) -> f64 {
        TAU * index as f64 / grid as f64
    }

    pub fn tabulate<F>(grid: usize, corr: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        check_grid(grid)?;
        let values: Vec<f64> = (0..grid * grid)
            .into_par_iter()
            .map(|k| corr(Self::phase(grid, k / grid), Self::phase(grid, k % grid)))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn from_values(grid: usize, values: Vec<f64>) -> Result<Self> {
        check_grid(grid)?;
        if values.len() != grid * grid {
            return Err(Error::invalid(
                "values",
                format!("expected {} entries, got {}", grid * grid, values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                at: Self::phase(grid, i / grid),
            });
        }
        Ok(Self { grid, values })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid + j]
    }

    /// Exhaustive search for the largest `|s|`; ties go to the
    /// lexicographically smallest `(a, a′, b, b′)` index tuple.
    pub fn max_violation(&self) -> (ChshSetting, ChshResult) {
        let g = self.grid;
        let best = (0..g)
            .into_par_iter()
            .map(|a| {
                let mut best: Option<(f64, [usize; 4])> = None;
                for ap in 0..g {
                    for b in 0..g {
                        for bp in 0..g {
                            let s =
                                self.at(a, b) + self.at(a, bp) + self.at(ap, b) - self.at(ap, bp);
                            if best.is_none_or(|(v, _)| s.abs() > v) {
                                best = Some((s.abs(), [a, ap, b, bp]));
                            }
                        }
                    }
                }
                best.expect("grid is non-empty")
            })
            .reduce_with(|x, y| {
                if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            })
            .expect("grid is non-empty");
        let [a, ap, b, bp] = best.1;
        let setting = ChshSetting {
            a: Self::phase(g, a),
            a_prime: Self::phase(g, ap),
            b: Self::phase(g, b),
            b_prime: Self::phase(g, bp),
        };
        let result = ChshResult::from_terms([
            self.at(a, b),
            self.at(a, bp),
            self.at(ap, b),
            self.at(ap, bp),
        ]);
        (setting, result)
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID {
        Err(Error::invalid(
            "grid",
            format!("must be at least {MIN_GRID}, got {grid}"),
        ))
    } else {
        Ok(())
    }
}

/// Grid search for the setting with the largest `|s|`.
pub fn find_max_violation<F>(corr: F, grid: usize) -> Result<(ChshSetting, ChshResult)>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    Ok(CorrelationTable::tabulate(grid, corr)?.max_violation())
}

/// Tsirelson's value `2√2`.
pub fn tsirelson_bound() -> f64 {
    2.0 * 2f64.sqrt()
}
