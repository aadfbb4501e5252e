//! Expected counts by time averaging, the closed-form intensities, and
//! their moments over the hidden phase θ.
//!
//! Two independent routes reach the intensities `I₁…I₄`: quadrature of
//! `⟨h± · p⟩` over one period (any detector law) and the transcribed
//! closed forms (symmetric law only). Each checks the other.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{
    detection_probability, detector_density, Detector, DetectorKind, DetectorModel,
    ExperimentConfig, SignedDensity, Source,
};
use crate::quadrature::{
    node_covariance, node_mean, node_variance, period, PeriodicRule, THETA_NODES, TIME_NODES,
};

/// Variances below this fraction of the squared count scale are treated as zero.
pub const DEGENERATE_VARIANCE_RATIO: f64 = 1e-20;

/// One-period mean of `f` for angular frequency `omega`.
pub fn time_average<F: FnMut(f64) -> f64>(f: F, omega: f64) -> Result<f64> {
    PeriodicRule::new(TIME_NODES).mean(period(omega), f)
}

/// Time-averaged numbers of `+` and `−` photons absorbed by one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub plus: f64,
    pub minus: f64,
}

impl ExpectedCounts {
    /// Detected count after `±` annihilation, `|E₊ − E₋|`.
    pub fn detected(&self) -> f64 {
        (self.plus - self.minus).abs()
    }
}

/// Total density reaching `detector` at time `t` from its coherent reference and `u(θ)`.
fn arriving_density(
    detector: Detector,
    cfg: &ExperimentConfig,
    theta: f64,
    t: f64,
) -> Result<SignedDensity> {
    Ok(
        detector_density(detector, detector.coherent_source(), cfg, theta, t)?
            + detector_density(detector, Source::U, cfg, theta, t)?,
    )
}

pub fn expected_counts(
    detector: Detector,
    theta: f64,
    cfg: &ExperimentConfig,
    kind: DetectorKind,
) -> Result<ExpectedCounts> {
    let model = DetectorModel::new(kind, detector);
    let rule = PeriodicRule::new(TIME_NODES);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for t in rule.abscissae(cfg.period()) {
        let h = arriving_density(detector, cfg, theta, t)?;
        let p = detection_probability(&model, cfg, theta, t)?;
        plus += h.plus * p;
        minus += h.minus * p;
    }
    let n = rule.nodes() as f64;
    Ok(ExpectedCounts {
        plus: plus / n,
        minus: minus / n,
    })
}

/// Expected detected photon numbers at the four detectors for one θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityQuad {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

impl IntensityQuad {
    pub fn as_array(&self) -> [f64; 4] {
        [self.i1, self.i2, self.i3, self.i4]
    }

    /// Homodyne difference of the D1/D2 pair.
    pub fn x_difference(&self) -> f64 {
        self.i1 - self.i2
    }

    /// Homodyne difference of the D3/D4 pair.
    pub fn y_difference(&self) -> f64 {
        self.i3 - self.i4
    }

    pub fn max_abs_deviation(&self, other: &IntensityQuad) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form intensities of the symmetric detector law.
pub fn intensities_closed_form(theta: f64, cfg: &ExperimentConfig) -> IntensityQuad {
    let scale = cfg.efficiency / 16.0;
    let mean = cfg.alpha + cfg.beta / 2.0;
    let c = (theta - cfg.theta_i).cos();
    let s = (theta - cfg.theta_j).sin();
    IntensityQuad {
        i1: scale * (mean + mean * c),
        i2: scale * (mean - mean * c),
        i3: scale * (mean - mean * s),
        i4: scale * (mean + mean * s),
    }
}

/// Intensities from time-averaged expected counts under any detector law.
pub fn intensities_quadrature(
    theta: f64,
    cfg: &ExperimentConfig,
    kind: DetectorKind,
) -> Result<IntensityQuad> {
    let i = |d| expected_counts(d, theta, cfg, kind).map(|e| e.detected());
    Ok(IntensityQuad {
        i1: i(Detector::D1)?,
        i2: i(Detector::D2)?,
        i3: i(Detector::D3)?,
        i4: i(Detector::D4)?,
    })
}

/// A correlation coefficient, or the marker that it is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum Correlation {
    Defined(f64),
    /// At least one variance vanishes.
    Degenerate,
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Correlation::Defined(v) => Some(v),
            Correlation::Degenerate => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Correlation::Degenerate)
    }
}

/// Moments of the homodyne differences over uniformly distributed θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaMoments {
    /// `Var_θ(I₁ − I₂)`.
    pub var12: f64,
    /// `Var_θ(I₃ − I₄)`.
    pub var34: f64,
    /// `Cov_θ(I₁ − I₂, I₃ − I₄)`.
    pub cov: f64,
    pub rho: Correlation,
}

/// Moments over θ computed by quadrature of the time-averaged intensities.
pub fn theta_moments(cfg: &ExperimentConfig, kind: DetectorKind) -> Result<ThetaMoments> {
    let rule = PeriodicRule::new(THETA_NODES);
    let mut xs = Vec::with_capacity(rule.nodes());
    let mut ys = Vec::with_capacity(rule.nodes());
    let mut scale: f64 = 0.0;
    for theta in rule.abscissae(TAU) {
        let q = intensities_quadrature(theta, cfg, kind)?;
        xs.push(q.x_difference());
        ys.push(q.y_difference());
        scale = scale.max(q.i1 + q.i2).max(q.i3 + q.i4);
    }
    let var12 = node_variance(&xs);
    let var34 = node_variance(&ys);
    let cov = node_covariance(&xs, &ys);
    let floor = DEGENERATE_VARIANCE_RATIO * scale * scale;
    let rho = if scale == 0.0 || var12 <= floor || var34 <= floor {
        Correlation::Degenerate
    } else {
        Correlation::Defined((cov / (var12 * var34).sqrt()).clamp(-1.0, 1.0))
    };
    Ok(ThetaMoments {
        var12,
        var34,
        cov,
        rho,
    })
}

/// `C²(β + 2α)²/512`, the closed-form variance of either homodyne difference.
pub fn closed_form_variance(cfg: &ExperimentConfig) -> f64 {
    let a = cfg.efficiency * (cfg.beta + 2.0 * cfg.alpha);
    a * a / 512.0
}

/// `−sin(θi − θj)`.
pub fn closed_form_rho(cfg: &ExperimentConfig) -> f64 {
    -cfg.phase_difference().sin()
}

/// Variances of `E(D⁺)` taken in the two orders of averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingOrderGap {
    /// `Var_θ E_t(D⁺)`: average over time first, then vary θ.
    pub theta_of_time_average: f64,
    /// `Var_t E_θ(D⁺)`: average over θ first, then vary t.
    pub time_of_theta_average: f64,
}

impl AveragingOrderGap {
    pub fn gap(&self) -> f64 {
        (self.theta_of_time_average - self.time_of_theta_average).abs()
    }
}

pub fn averaging_order_gap(
    cfg: &ExperimentConfig,
    kind: DetectorKind,
    detector: Detector,
) -> Result<AveragingOrderGap> {
    let model = DetectorModel::new(kind, detector);
    let absorbed_plus = |theta: f64, t: f64| -> Result<f64> {
        let h = arriving_density(detector, cfg, theta, t)?;
        Ok(h.plus * detection_probability(&model, cfg, theta, t)?)
    };
    let times = PeriodicRule::new(TIME_NODES);
    let thetas = PeriodicRule::new(THETA_NODES);
    let tp = cfg.period();

    let time_avgs = thetas.sample(TAU, |theta| times.try_mean(tp, |t| absorbed_plus(theta, t)))?;
    let theta_avgs = times.sample(tp, |t| {
        thetas.try_mean(TAU, |theta| absorbed_plus(theta, t))
    })?;

    debug_assert!((node_mean(&time_avgs) - node_mean(&theta_avgs)).abs() < 1e-9);
    Ok(AveragingOrderGap {
        theta_of_time_average: node_variance(&time_avgs),
        time_of_theta_average: node_variance(&theta_avgs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn time_average_examples() {
        let w = 2.5;
        assert!(time_average(|t| (w * t).cos(), w).unwrap().abs() < 1e-15);
        assert_relative_eq!(
            time_average(|t| (w * t).cos().powi(2), w).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let (a, b) = (0.7, -1.9);
        assert_relative_eq!(
            time_average(|t| (w * t + a).cos() * (w * t + b).cos(), w).unwrap(),
            (a - b).cos() / 2.0,
            epsilon = 1e-15
        );
        assert!(time_average(|_| f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn zero_efficiency_gives_zero_counts() {
        let cfg = ExperimentConfig {
            efficiency: 0.0,
            ..Default::default()
        };
        for d in Detector::ALL {
            let e = expected_counts(d, 0.4, &cfg, DetectorKind::Symmetric).unwrap();
            assert_eq!((e.plus, e.minus), (0.0, 0.0));
        }
    }

    #[test]
    fn closed_form_examples() {
        let cfg = ExperimentConfig::new(1.0, 1.0, 1.0, 0.3, 1.1).unwrap();
        let q = intensities_closed_form(cfg.theta_i, &cfg);
        assert_relative_eq!(q.i1, 1.5 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(q.i2, 0.0, epsilon = 1e-15);

        let q = intensities_closed_form(cfg.theta_j, &cfg);
        assert_relative_eq!(q.i3, 1.5 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(q.i4, 1.5 / 16.0, epsilon = 1e-15);

        let q = intensities_closed_form(cfg.theta_i + FRAC_PI_3, &cfg);
        assert_relative_eq!(q.i1, 0.140625, epsilon = 1e-15);
    }

    #[test]
    fn quadrature_without_u_source() {
        let cfg = ExperimentConfig::new(2.0, 0.0, 0.8, 0.4, 0.0).unwrap();
        for theta in [0.0, 0.9, 2.0, 4.4] {
            let q = intensities_quadrature(theta, &cfg, DetectorKind::Symmetric).unwrap();
            let expect = cfg.efficiency * cfg.alpha / 8.0 * (theta - cfg.theta_i).cos();
            assert_relative_eq!(q.x_difference(), expect, epsilon = 1e-14);
        }
        let dark = ExperimentConfig::new(0.0, 0.0, 1.0, 0.4, 0.0).unwrap();
        let q = intensities_quadrature(1.0, &dark, DetectorKind::Symmetric).unwrap();
        assert_eq!(q.as_array(), [0.0; 4]);
    }

    #[test]
    fn moments_examples() {
        let cfg = ExperimentConfig::new(1.0, 1.0, 1.0, FRAC_PI_2, 0.0).unwrap();
        let m = theta_moments(&cfg, DetectorKind::Symmetric).unwrap();
        assert_relative_eq!(m.var12, 9.0 / 512.0, epsilon = 1e-15);
        assert_relative_eq!(m.var34, 9.0 / 512.0, epsilon = 1e-15);
        assert_relative_eq!(m.rho.value().unwrap(), -1.0, epsilon = 1e-12);

        let same = cfg.with_phases(1.0, 1.0);
        let m = theta_moments(&same, DetectorKind::Symmetric).unwrap();
        assert!(m.rho.value().unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_degenerate_not_nan() {
        for cfg in [
            ExperimentConfig::new(0.0, 0.0, 1.0, 0.1, 0.2).unwrap(),
            ExperimentConfig::new(1.0, 1.0, 0.0, 0.1, 0.2).unwrap(),
        ] {
            let m = theta_moments(&cfg, DetectorKind::Symmetric).unwrap();
            assert_eq!(m.rho, Correlation::Degenerate);
            assert_eq!(m.var12, 0.0);
        }
        // coherent-only with no u-source: the differences are constant in θ
        let cfg = ExperimentConfig::new(1.0, 0.0, 1.0, 0.1, 0.2).unwrap();
        let m = theta_moments(&cfg, DetectorKind::CoherentOnly).unwrap();
        assert!(m.rho.is_degenerate());
    }

    #[test]
    fn averaging_order_degenerate_cases() {
        for cfg in [
            ExperimentConfig::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap(),
            ExperimentConfig::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap(),
        ] {
            let g = averaging_order_gap(&cfg, DetectorKind::Symmetric, Detector::D1).unwrap();
            assert_eq!(g.theta_of_time_average, 0.0);
            assert_eq!(g.time_of_theta_average, 0.0);
        }
    }
}
