use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{Detector, ExperimentConfig};
use crate::error::{Error, Result};

/// Which absorption-probability law the detectors follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    /// The absorber oscillates with the coherent reference and with `u`
    /// on equal footing.
    #[default]
    Symmetric,
    /// The absorber follows only the local coherent reference.
    CoherentOnly,
    /// Each phase is weighted by the amplitude of the source carrying it.
    AmplitudeWeighted,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [
        DetectorKind::Symmetric,
        DetectorKind::CoherentOnly,
        DetectorKind::AmplitudeWeighted,
    ];

    /// Absorber phase offsets in quarter turns as (coherent term, `u` term).
    ///
    /// These follow the published absorption laws. They agree with the
    /// arrival phases from the geometry except at D2 of the symmetric and
    /// amplitude-weighted laws, whose absorber sits half a turn away; that
    /// flips the sign of `E₊ − E₋` there but not its magnitude.
    fn absorber_quarter_turns(self, detector: Detector) -> (u32, u32) {
        match (self, detector) {
            (DetectorKind::CoherentOnly, Detector::D2) => (0, 0),
            (_, Detector::D1) => (1, 1),
            (_, Detector::D2) => (2, 0),
            (_, Detector::D3) => (0, 1),
            (_, Detector::D4) => (1, 0),
        }
    }
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(DetectorKind::Symmetric),
            "coherent-only" => Ok(DetectorKind::CoherentOnly),
            "amplitude-weighted" => Ok(DetectorKind::AmplitudeWeighted),
            other => Err(Error::invalid(
                "model",
                format!("unknown detector model `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DetectorKind::Symmetric => "symmetric",
            DetectorKind::CoherentOnly => "coherent-only",
            DetectorKind::AmplitudeWeighted => "amplitude-weighted",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub kind: DetectorKind,
    pub detector: Detector,
    /// Free absorber phase of the generic law. The concrete laws fix their
    /// phases from θ, θi and θj and ignore it.
    pub psi: Option<f64>,
}

impl DetectorModel {
    pub fn new(kind: DetectorKind, detector: Detector) -> Self {
        Self {
            kind,
            detector,
            psi: None,
        }
    }
}

/// Generic periodic absorber, `(C/2)(1 + cos(ωt + ψ))`.
pub fn absorption_probability(efficiency: f64, omega: f64, t: f64, psi: f64) -> f64 {
    efficiency / 2.0 * (1.0 + (omega * t + psi).cos())
}

/// Probability that `model.detector` absorbs a photon at time `t`.
pub fn detection_probability(
    model: &DetectorModel,
    cfg: &ExperimentConfig,
    theta: f64,
    t: f64,
) -> Result<f64> {
    let (cq, uq) = model.kind.absorber_quarter_turns(model.detector);
    let wt = cfg.omega * t;
    let coherent =
        (wt + model.detector.coherent_source().phase(cfg, theta) + f64::from(cq) * FRAC_PI_2).cos();
    let hidden = (wt + theta + f64::from(uq) * FRAC_PI_2).cos();
    let c = cfg.efficiency;
    let p = match model.kind {
        DetectorKind::Symmetric => c / 4.0 * (2.0 + coherent + hidden),
        DetectorKind::CoherentOnly => c / 2.0 * (1.0 + coherent),
        DetectorKind::AmplitudeWeighted => {
            let total = cfg.alpha + cfg.beta;
            if total <= 0.0 {
                return Err(Error::ZeroAmplitude);
            }
            c / 2.0 * (1.0 + (cfg.alpha * coherent + cfg.beta * hidden) / total)
        }
    };
    // roundoff can push 1 + cos(π) a hair below zero
    Ok(p.clamp(0.0, c))
}
