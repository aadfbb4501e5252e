//! Declarative description of the double-homodyne interferometer.
//!
//! `u(θ)` travels right through BS3 and BS2 into D4. BS3 reflects part of
//! it down through BS1 into D1, and BS1 reflects part of that into D2. BS2
//! reflects part of the direct beam down into D3. The coherent source `αi`
//! enters BS1 from the left (pass → D2, reflect → D1) and `αj` enters BS2
//! from above (pass → D3, reflect → D4).
//!
//! Every splitter interaction halves the density; a reflection adds a
//! quarter turn of phase.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{Detector, ExperimentConfig, SignedDensity, Source};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitter {
    Bs1,
    Bs2,
    Bs3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interaction {
    Pass,
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEvent {
    pub splitter: Splitter,
    pub interaction: Interaction,
}

/// One source-to-detector path as an ordered list of splitter events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub source: Source,
    pub detector: Detector,
    pub events: Vec<PathEvent>,
}

impl PathSpec {
    /// Number of reflections, i.e. accumulated quarter turns of phase.
    pub fn quarter_turns(&self) -> u32 {
        self.events
            .iter()
            .filter(|e| e.interaction == Interaction::Reflect)
            .count() as u32
    }

    pub fn phase(&self) -> f64 {
        f64::from(self.quarter_turns()) * FRAC_PI_2
    }

    /// Fraction of the emitted density surviving the splitters.
    pub fn transmission(&self) -> f64 {
        0.5f64.powi(self.events.len() as i32)
    }
}

/// All source/detector paths of the setup.
pub fn interferometer_paths() -> Vec<PathSpec> {
    use Detector::*;
    use Interaction::*;
    use Source::*;
    use Splitter::*;

    let p = |source, detector, events: &[(Splitter, Interaction)]| PathSpec {
        source,
        detector,
        events: events
            .iter()
            .map(|&(splitter, interaction)| PathEvent {
                splitter,
                interaction,
            })
            .collect(),
    };

    vec![
        p(U, D1, &[(Bs3, Reflect), (Bs1, Pass)]),
        p(U, D2, &[(Bs3, Reflect), (Bs1, Reflect)]),
        p(U, D3, &[(Bs3, Pass), (Bs2, Reflect)]),
        p(U, D4, &[(Bs3, Pass), (Bs2, Pass)]),
        p(AlphaI, D1, &[(Bs1, Reflect)]),
        p(AlphaI, D2, &[(Bs1, Pass)]),
        p(AlphaJ, D3, &[(Bs2, Pass)]),
        p(AlphaJ, D4, &[(Bs2, Reflect)]),
    ]
}

/// The path from `source` to `detector`, if the geometry has one.
pub fn path(source: Source, detector: Detector) -> Result<PathSpec> {
    interferometer_paths()
        .into_iter()
        .find(|p| p.source == source && p.detector == detector)
        .ok_or(Error::Unreachable {
            emitter: source,
            detector,
        })
}

/// Density of `±` photons from `source` arriving at `detector` at time `t`.
pub fn detector_density(
    detector: Detector,
    source: Source,
    cfg: &ExperimentConfig,
    theta: f64,
    t: f64,
) -> Result<SignedDensity> {
    let path = path(source, detector)?;
    let amplitude = source.emitted_amplitude(cfg) * path.transmission();
    let phase = cfg.omega * t + source.phase(cfg, theta) + path.phase();
    Ok(SignedDensity::oscillating(amplitude, phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn composed_phases_match_published_table() {
        use Detector::*;
        use Source::*;
        // quarter turns transcribed from the published density expressions
        let table = [
            (U, D1, 1),
            (U, D2, 2),
            (U, D3, 1),
            (U, D4, 0),
            (AlphaI, D1, 1),
            (AlphaI, D2, 0),
            (AlphaJ, D3, 0),
            (AlphaJ, D4, 1),
        ];
        for (s, d, q) in table {
            let p = path(s, d).unwrap();
            assert_eq!(p.quarter_turns(), q, "{s:?} -> {d:?}");
        }
        assert_eq!(path(U, D2).unwrap().phase(), PI);
        assert_eq!(interferometer_paths().len(), table.len());
    }

    #[test]
    fn amplitudes_halve_per_splitter() {
        let cfg = ExperimentConfig {
            alpha: 4.0,
            beta: 8.0,
            ..Default::default()
        };
        for d in Detector::ALL {
            let u = detector_density(d, Source::U, &cfg, 0.3, 0.1).unwrap();
            assert_relative_eq!(u.total(), 2.0 * cfg.beta / 8.0, epsilon = 1e-15);
            let c = detector_density(d, d.coherent_source(), &cfg, 0.3, 0.1).unwrap();
            assert_relative_eq!(c.total(), 2.0 * cfg.alpha / 4.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn detector_density_examples() {
        let cfg = ExperimentConfig {
            beta: 8.0,
            alpha: 4.0,
            theta_i: 0.0,
            ..Default::default()
        };
        let d = detector_density(Detector::D4, Source::U, &cfg, 0.0, 0.0).unwrap();
        assert_eq!((d.plus, d.minus), (2.0, 0.0));

        let d = detector_density(Detector::D1, Source::AlphaI, &cfg, 0.0, 0.0).unwrap();
        assert_relative_eq!(d.plus, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.minus, 1.0, epsilon = 1e-15);

        // D2 sees u half a turn out of phase
        let d = detector_density(Detector::D2, Source::U, &cfg, 0.0, 0.0).unwrap();
        assert_relative_eq!(d.plus, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.minus, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn unreachable_pairs_are_errors() {
        let cfg = ExperimentConfig::default();
        for (s, d) in [
            (Source::AlphaI, Detector::D3),
            (Source::AlphaI, Detector::D4),
            (Source::AlphaJ, Detector::D1),
            (Source::AlphaJ, Detector::D2),
        ] {
            assert_eq!(
                detector_density(d, s, &cfg, 0.0, 0.0).unwrap_err(),
                Error::Unreachable {
                    emitter: s,
                    detector: d
                }
            );
        }
    }
}
