//! Discrete ±1 photon counts of the two homodyne pairs.
//!
//! Each trial draws the hidden phase θ uniformly, then draws `X` (D1 fires
//! → +1, D2 fires → −1) and `Y` (D3 → +1, D4 → −1) independently given θ,
//! with `P(X = +1 | θ) = (1 + E(X|θ))/2`. Conditional independence given θ
//! is the locality condition: `X` sees only θi, `Y` only θj.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws from the ChaCha8
//! stream `k` of the run seed, so the sample stream depends only on
//! `(n, seed, chunk)`. Chunk results are integer sums and are combined in
//! chunk order, which makes estimates bit-identical for any worker count.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::intensities_closed_form;
use crate::error::{Error, HomodynePair, Result};
use crate::model::ExperimentConfig;
use crate::quadrature::{PeriodicRule, THETA_NODES};

/// Default number of trials.
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Default trials per chunk.
pub const DEFAULT_CHUNK: u64 = 16_384;

/// Sign convention for `E(Y|θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YConvention {
    /// `(I₃ − I₄)/(I₃ + I₄)` from the intensities, which is `−sin(θ − θj)`.
    #[default]
    RatioDerived,
    /// The published formula `sin(θ − θj)`, for comparison only.
    Published,
}

/// Conditional means of the two counters given θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMeans {
    /// `(I₁ − I₂)/(I₁ + I₂)`.
    pub ex: f64,
    /// `(I₃ − I₄)/(I₃ + I₄)`.
    pub ey_ratio: f64,
    /// `sin(θ − θj)`, as published alongside the intensities.
    pub ey_published: f64,
}

impl ConditionalMeans {
    pub fn ey(&self, convention: YConvention) -> f64 {
        match convention {
            YConvention::RatioDerived => self.ey_ratio,
            YConvention::Published => self.ey_published,
        }
    }
}

pub fn conditional_expectations(theta: f64, cfg: &ExperimentConfig) -> Result<ConditionalMeans> {
    let q = intensities_closed_form(theta, cfg);
    let nx = q.i1 + q.i2;
    let ny = q.i3 + q.i4;
    if nx.is_nan() || nx <= 0.0 {
        return Err(Error::DegenerateHomodyne(HomodynePair::X));
    }
    if ny.is_nan() || ny <= 0.0 {
        return Err(Error::DegenerateHomodyne(HomodynePair::Y));
    }
    Ok(ConditionalMeans {
        ex: (q.x_difference() / nx).clamp(-1.0, 1.0),
        ey_ratio: (q.y_difference() / ny).clamp(-1.0, 1.0),
        ey_published: (theta - cfg.theta_j).sin(),
    })
}

/// A local hidden-variable model: conditional means of `X` and `Y` given θ.
pub trait LocalModel: Sync {
    fn means(&self, theta: f64) -> Result<(f64, f64)>;
}

/// The double-homodyne setup under the symmetric closed-form intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneModel {
    pub cfg: ExperimentConfig,
    pub convention: YConvention,
}

impl HomodyneModel {
    pub fn new(cfg: ExperimentConfig) -> Self {
        Self {
            cfg,
            convention: YConvention::RatioDerived,
        }
    }

    pub fn with_convention(cfg: ExperimentConfig, convention: YConvention) -> Self {
        Self { cfg, convention }
    }
}

impl LocalModel for HomodyneModel {
    fn means(&self, theta: f64) -> Result<(f64, f64)> {
        let m = conditional_expectations(theta, &self.cfg)?;
        Ok((m.ex, m.ey(self.convention)))
    }
}

/// How the hidden phase is drawn per trial.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "draw", content = "theta")]
pub enum HiddenPhase {
    #[default]
    Uniform,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    /// Number of trials.
    pub n: u64,
    /// Reproducibility seed.
    pub seed: u64,
    /// Trials per chunk.
    pub chunk: u64,
    pub hidden_phase: HiddenPhase,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            n: DEFAULT_TRIALS,
            seed: 0,
            chunk: DEFAULT_CHUNK,
            hidden_phase: HiddenPhase::Uniform,
        }
    }
}

impl SamplerSpec {
    pub fn new(n: u64, seed: u64) -> Self {
        Self {
            n,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chunk == 0 {
            return Err(Error::invalid("chunk", "must be at least 1"));
        }
        if let HiddenPhase::Fixed(theta) = self.hidden_phase {
            if !theta.is_finite() {
                return Err(Error::invalid("hidden_phase", "fixed theta must be finite"));
            }
        }
        Ok(())
    }

    /// Number of chunks; zero for an invalid zero-size chunk.
    pub fn chunks(&self) -> u64 {
        if self.chunk == 0 {
            return 0;
        }
        self.n.div_ceil(self.chunk)
    }

    fn chunk_len(&self, index: u64) -> u64 {
        let start = index * self.chunk;
        self.chunk.min(self.n - start)
    }
}

/// One trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    pub theta: f64,
    pub x: i8,
    pub y: i8,
}

fn draw<M: LocalModel + ?Sized>(
    rng: &mut ChaCha8Rng,
    model: &M,
    hidden: HiddenPhase,
) -> Result<CountSample> {
    let theta = match hidden {
        HiddenPhase::Uniform => rng.random::<f64>() * TAU,
        HiddenPhase::Fixed(theta) => theta,
    };
    let (ex, ey) = model.means(theta)?;
    let ux: f64 = rng.random();
    let uy: f64 = rng.random();
    let x = if ux < (1.0 + ex) / 2.0 { 1 } else { -1 };
    let y = if uy < (1.0 + ey) / 2.0 { 1 } else { -1 };
    Ok(CountSample { theta, x, y })
}

fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples of chunk `index`.
pub fn sample_chunk<M: LocalModel + ?Sized>(
    spec: &SamplerSpec,
    model: &M,
    index: u64,
) -> Result<Vec<CountSample>> {
    spec.validate()?;
    if index >= spec.chunks() {
        return Ok(Vec::new());
    }
    let mut rng = chunk_rng(spec.seed, index);
    (0..spec.chunk_len(index))
        .map(|_| draw(&mut rng, model, spec.hidden_phase))
        .collect()
}

/// The full sample stream, chunk by chunk.
pub fn sample_counts<'a, M: LocalModel + ?Sized>(
    spec: &'a SamplerSpec,
    model: &'a M,
) -> impl Iterator<Item = Result<CountSample>> + 'a {
    (0..spec.chunks()).flat_map(move |index| {
        let mut rng = chunk_rng(spec.seed, index);
        let hidden = spec.hidden_phase;
        (0..spec.chunk_len(index)).map(move |_| draw(&mut rng, model, hidden))
    })
}

/// Integer moment sums of a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountSums {
    pub n: u64,
    pub sum_x: i64,
    pub sum_y: i64,
    pub sum_xy: i64,
}

impl CountSums {
    pub fn push(&mut self, s: &CountSample) {
        self.n += 1;
        self.sum_x += i64::from(s.x);
        self.sum_y += i64::from(s.y);
        self.sum_xy += i64::from(s.x * s.y);
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            n: self.n + other.n,
            sum_x: self.sum_x + other.sum_x,
            sum_y: self.sum_y + other.sum_y,
            sum_xy: self.sum_xy + other.sum_xy,
        }
    }

    pub fn summary(&self) -> Result<CountSummary> {
        if self.n < 2 {
            return Err(Error::TooFewSamples(self.n));
        }
        let n = self.n as f64;
        let mx = self.sum_x as f64 / n;
        let my = self.sum_y as f64 / n;
        let mxy = self.sum_xy as f64 / n;
        let cov = mxy - mx * my;
        // E[((X − x̄)(Y − ȳ))²] expanded with X² = Y² = 1
        let a = 1.0 + mx * mx;
        let b = 1.0 + my * my;
        let second = a * b - 2.0 * a * my * my - 2.0 * b * mx * mx + 4.0 * mx * my * mxy;
        let var_product = (second - cov * cov).max(0.0);
        Ok(CountSummary {
            mean_x: mean_estimate(mx, self.n),
            mean_y: mean_estimate(my, self.n),
            cov: Estimate {
                mean: cov,
                se: (var_product / n).sqrt(),
                n: self.n,
            },
        })
    }
}

fn mean_estimate(m: f64, n: u64) -> Estimate {
    Estimate {
        mean: m,
        se: ((1.0 - m * m).max(0.0) / n as f64).sqrt(),
        n,
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: u64,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn brackets(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub mean_x: Estimate,
    pub mean_y: Estimate,
    pub cov: Estimate,
}

/// Plug-in sample covariance of `X` and `Y` with its standard error.
///
/// Computed from the samples directly (two passes), independent of the
/// chunked integer sums used by [`simulate`].
pub fn estimate_correlation<I>(samples: I) -> Result<Estimate>
where
    I: IntoIterator<Item = CountSample>,
{
    let pts: Vec<(f64, f64)> = samples
        .into_iter()
        .map(|s| (f64::from(s.x), f64::from(s.y)))
        .collect();
    let n = pts.len() as u64;
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let products: Vec<f64> = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).collect();
    let cov = products.iter().sum::<f64>() / nf;
    let var = products.iter().map(|p| (p - cov) * (p - cov)).sum::<f64>() / nf;
    Ok(Estimate {
        mean: cov,
        se: (var / nf).sqrt(),
        n,
    })
}

/// Runs all trials on `workers` threads (0 = rayon's default) and reduces
/// the chunk sums in chunk order.
pub fn simulate<M: LocalModel + ?Sized>(
    spec: &SamplerSpec,
    model: &M,
    workers: usize,
) -> Result<CountSummary> {
    spec.validate()?;
    if spec.n < 2 {
        return Err(Error::TooFewSamples(spec.n));
    }
    let run = || -> Result<Vec<CountSums>> {
        (0..spec.chunks())
            .into_par_iter()
            .map(|index| {
                let mut rng = chunk_rng(spec.seed, index);
                let mut sums = CountSums::default();
                for _ in 0..spec.chunk_len(index) {
                    sums.push(&draw(&mut rng, model, spec.hidden_phase)?);
                }
                Ok(sums)
            })
            .collect()
    };
    let per_chunk = if workers == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?
            .install(run)?
    };
    per_chunk
        .into_iter()
        .fold(CountSums::default(), CountSums::merge)
        .summary()
}

/// Moments of the counters implied by the model, by quadrature over θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    /// `E_θ[ex·ey] − E_θ[ex]·E_θ[ey]`.
    pub cov: f64,
}

pub fn quadrature_oracle<M: LocalModel + ?Sized>(model: &M) -> Result<OracleMoments> {
    let rule = PeriodicRule::new(THETA_NODES);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxy = 0.0;
    for theta in rule.abscissae(TAU) {
        let (ex, ey) = model.means(theta)?;
        sx += ex;
        sy += ey;
        sxy += ex * ey;
    }
    let n = rule.nodes() as f64;
    let (mx, my) = (sx / n, sy / n);
    Ok(OracleMoments {
        mean_x: mx,
        mean_y: my,
        cov: sxy / n - mx * my,
    })
}
