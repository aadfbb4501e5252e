//! Physical parameters and the pointwise densities of the particle model.
//!
//! Photons come in `+` and `−` states. A harmonically oscillating source
//! emits them with densities `(A_s/2)(1 ± cos ωt)`; their difference acts
//! as the field and their sum as its normalisation. Path-dependent phases
//! of the form `k·x` are neglected throughout, only phase differences at
//! the detectors matter.
//!
//! Quantities are in dimensionless simulation units with `ω = 1` unless a
//! caller says otherwise.

mod detector;
mod geometry;

pub use detector::{absorption_probability, detection_probability, DetectorKind, DetectorModel};
pub use geometry::{
    detector_density, interferometer_paths, path, Interaction, PathEvent, PathSpec, Splitter,
};

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{period, PeriodicRule, TIME_NODES};

/// Reduces a phase to `[0, 2π)`.
pub fn reduce_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Constants of a single spherically symmetric source and its field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Angular frequency ω.
    pub omega: f64,
    /// Source strength `A_s` of the emission density.
    pub source_strength: f64,
    /// Strength `A` of the spherical expectation density.
    pub spherical_strength: f64,
    /// Field scale `ℰ₀`.
    pub field_scale: f64,
    /// Signal speed `c`.
    pub signal_speed: f64,
}

impl PhysicalConstants {
    pub fn new(
        omega: f64,
        source_strength: f64,
        spherical_strength: f64,
        field_scale: f64,
        signal_speed: f64,
    ) -> Result<Self> {
        let k = Self {
            omega,
            source_strength,
            spherical_strength,
            field_scale,
            signal_speed,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega", self.omega)?;
        positive("signal_speed", self.signal_speed)?;
        non_negative("source_strength", self.source_strength)?;
        non_negative("spherical_strength", self.spherical_strength)?;
        if !self.field_scale.is_finite() {
            return Err(Error::invalid("field_scale", "must be finite"));
        }
        Ok(())
    }

    /// Retarded phase `ω(t − r/c)`.
    pub fn retarded_phase(&self, t: f64, r: f64) -> f64 {
        self.omega * (t - r / self.signal_speed)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            omega: 1.0,
            source_strength: 1.0,
            spherical_strength: 4.0 * PI,
            field_scale: 1.0,
            signal_speed: 1.0,
        }
    }
}

/// Free parameters of the double-homodyne experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coherent amplitude α; each coherent source has amplitude α/2.
    pub alpha: f64,
    /// Amplitude β of the source under study, `u(θ)`.
    pub beta: f64,
    /// Detector efficiency C.
    pub efficiency: f64,
    /// Phase θi of the coherent source feeding D1/D2.
    pub theta_i: f64,
    /// Phase θj of the coherent source feeding D3/D4.
    pub theta_j: f64,
    /// Angular frequency ω.
    pub omega: f64,
}

impl ExperimentConfig {
    /// Validated config with phases reduced to `[0, 2π)` and `ω = 1`.
    pub fn new(alpha: f64, beta: f64, efficiency: f64, theta_i: f64, theta_j: f64) -> Result<Self> {
        Self {
            alpha,
            beta,
            efficiency,
            theta_i,
            theta_j,
            omega: 1.0,
        }
        .normalized()
    }

    /// Same config at another pair of coherent phases.
    pub fn with_phases(&self, theta_i: f64, theta_j: f64) -> Self {
        Self {
            theta_i: reduce_phase(theta_i),
            theta_j: reduce_phase(theta_j),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("alpha", self.alpha)?;
        non_negative("beta", self.beta)?;
        // C = 0 is admitted; it is the zero-count degenerate case.
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::invalid(
                "efficiency",
                format!("must lie in [0, 1], got {}", self.efficiency),
            ));
        }
        positive("omega", self.omega)?;
        for (name, v) in [("theta_i", self.theta_i), ("theta_j", self.theta_j)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Validates and reduces both phases.
    pub fn normalized(self) -> Result<Self> {
        self.validate()?;
        Ok(self.with_phases(self.theta_i, self.theta_j))
    }

    pub fn period(&self) -> f64 {
        period(self.omega)
    }

    /// `θi − θj`.
    pub fn phase_difference(&self) -> f64 {
        self.theta_i - self.theta_j
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            efficiency: 1.0,
            theta_i: PI / 2.0,
            theta_j: 0.0,
            omega: 1.0,
        }
    }
}

/// Expectation densities of `+` and `−` photons at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedDensity {
    pub plus: f64,
    pub minus: f64,
}

impl SignedDensity {
    /// `amplitude·(1 ± cos phase)`.
    pub fn oscillating(amplitude: f64, phase: f64) -> Self {
        let c = phase.cos();
        Self {
            plus: amplitude * (1.0 + c),
            minus: amplitude * (1.0 - c),
        }
    }

    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }

    pub fn difference(&self) -> f64 {
        self.plus - self.minus
    }
}

impl std::ops::Add for SignedDensity {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            plus: self.plus + rhs.plus,
            minus: self.minus + rhs.minus,
        }
    }
}

/// Emission density of a harmonic source at time `t`.
pub fn source_density(t: f64, source_strength: f64, omega: f64) -> SignedDensity {
    SignedDensity::oscillating(source_strength / 2.0, omega * t)
}

/// Density at distance `r` from a spherical source, `(A/8πr²)(1 ± cos ω(t − r/c))`.
pub fn spherical_density(t: f64, r: f64, k: &PhysicalConstants) -> Result<SignedDensity> {
    check_distance(r)?;
    let amplitude = k.spherical_strength / (8.0 * PI * r * r);
    Ok(SignedDensity::oscillating(
        amplitude,
        k.retarded_phase(t, r),
    ))
}

/// Scalar field `ℰ₀(h₊ − h₋)/√(h₊ + h₋)`.
pub fn scalar_field(d: SignedDensity, field_scale: f64) -> Result<f64> {
    let total = d.total();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DarkPoint);
    }
    Ok(field_scale * d.difference() / total.sqrt())
}

/// Field of a spherical source in its reduced form `ℰ₀√(A/4πr²)·cos ω(t − r/c)`.
pub fn spherical_field(t: f64, r: f64, k: &PhysicalConstants) -> Result<f64> {
    check_distance(r)?;
    let scale = (k.spherical_strength / (4.0 * PI * r * r)).sqrt();
    Ok(k.field_scale * scale * k.retarded_phase(t, r).cos())
}

/// Time average of `ℰ²` over one period, evaluated from the densities.
pub fn mean_intensity(k: &PhysicalConstants, r: f64) -> Result<f64> {
    check_distance(r)?;
    k.validate()?;
    if k.spherical_strength == 0.0 {
        // no photons, no field
        return Ok(0.0);
    }
    PeriodicRule::new(TIME_NODES).try_mean(period(k.omega), |t| {
        let e = scalar_field(spherical_density(t, r, k)?, k.field_scale)?;
        Ok(e * e)
    })
}

/// `ℰ₀²A/(8πr²)`.
pub fn mean_intensity_closed_form(k: &PhysicalConstants, r: f64) -> Result<f64> {
    check_distance(r)?;
    Ok(k.field_scale * k.field_scale * k.spherical_strength / (8.0 * PI * r * r))
}

fn check_distance(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDistance(r))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be non-negative and finite, got {v}"),
        ))
    }
}

/// Detectors of the two homodyne pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::D1, Detector::D2, Detector::D3, Detector::D4];

    /// Coherent reference that reaches this detector.
    pub fn coherent_source(self) -> Source {
        match self {
            Detector::D1 | Detector::D2 => Source::AlphaI,
            Detector::D3 | Detector::D4 => Source::AlphaJ,
        }
    }
}

/// Sources of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    /// The source under study, `u(θ)`, with unknown phase θ.
    U,
    /// Coherent source with phase θi.
    AlphaI,
    /// Coherent source with phase θj.
    AlphaJ,
}

impl Source {
    /// Prefactor of the emitted density: β/2 for `u`, α/2 for the coherent sources.
    pub fn emitted_amplitude(self, cfg: &ExperimentConfig) -> f64 {
        match self {
            Source::U => cfg.beta / 2.0,
            Source::AlphaI | Source::AlphaJ => cfg.alpha / 2.0,
        }
    }

    pub fn phase(self, cfg: &ExperimentConfig, theta: f64) -> f64 {
        match self {
            Source::U => theta,
            Source::AlphaI => cfg.theta_i,
            Source::AlphaJ => cfg.theta_j,
        }
    }
}
