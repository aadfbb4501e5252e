//! Test-only oracles, written directly from the published expressions and
//! integrated with a fine midpoint rule. Nothing here touches the crate's
//! path composition or its node-count quadrature.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use lhv_photons::model::{Detector, DetectorKind, ExperimentConfig};

pub const MIDPOINTS: usize = 4096;

/// Midpoint-rule mean over `[0, period)`.
pub fn midpoint_mean(period: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = period / MIDPOINTS as f64;
    (0..MIDPOINTS).map(|k| f((k as f64 + 0.5) * h)).sum::<f64>() / MIDPOINTS as f64
}

/// `(h₊ − h₋, h₊ + h₋)` at a detector, transcribed per detector.
fn density_terms(d: Detector, cfg: &ExperimentConfig, theta: f64, t: f64) -> (f64, f64) {
    let wt = cfg.omega * t;
    let (a, b) = (cfg.alpha, cfg.beta);
    let (coh, u) = match d {
        Detector::D1 => (
            (wt + cfg.theta_i + FRAC_PI_2).cos(),
            (wt + theta + FRAC_PI_2).cos(),
        ),
        Detector::D2 => ((wt + cfg.theta_i).cos(), (wt + theta + PI).cos()),
        Detector::D3 => ((wt + cfg.theta_j).cos(), (wt + theta + FRAC_PI_2).cos()),
        Detector::D4 => ((wt + cfg.theta_j + FRAC_PI_2).cos(), (wt + theta).cos()),
    };
    (a / 2.0 * coh + b / 4.0 * u, a / 2.0 + b / 4.0)
}

pub fn plus_density(d: Detector, cfg: &ExperimentConfig, theta: f64, t: f64) -> f64 {
    let (diff, total) = density_terms(d, cfg, theta, t);
    (total + diff) / 2.0
}

pub fn probability(
    kind: DetectorKind,
    d: Detector,
    cfg: &ExperimentConfig,
    theta: f64,
    t: f64,
) -> f64 {
    let wt = cfg.omega * t;
    let (ti, tj, c) = (cfg.theta_i, cfg.theta_j, cfg.efficiency);
    let (a, b) = (cfg.alpha, cfg.beta);
    let pair = |x: f64, y: f64| match kind {
        DetectorKind::Symmetric => c / 4.0 * (2.0 + x + y),
        DetectorKind::AmplitudeWeighted => c / 2.0 * (1.0 + (a * x + b * y) / (a + b)),
        DetectorKind::CoherentOnly => unreachable!(),
    };
    match (kind, d) {
        (DetectorKind::CoherentOnly, Detector::D1) => c / 2.0 * (1.0 + (wt + ti + FRAC_PI_2).cos()),
        (DetectorKind::CoherentOnly, Detector::D2) => c / 2.0 * (1.0 + (wt + ti).cos()),
        (DetectorKind::CoherentOnly, Detector::D3) => c / 2.0 * (1.0 + (wt + tj).cos()),
        (DetectorKind::CoherentOnly, Detector::D4) => c / 2.0 * (1.0 + (wt + tj + FRAC_PI_2).cos()),
        (_, Detector::D1) => pair((wt + ti + FRAC_PI_2).cos(), (wt + theta + FRAC_PI_2).cos()),
        (_, Detector::D2) => pair((wt + ti + PI).cos(), (wt + theta).cos()),
        (_, Detector::D3) => pair((wt + tj).cos(), (wt + theta + FRAC_PI_2).cos()),
        (_, Detector::D4) => pair((wt + tj + FRAC_PI_2).cos(), (wt + theta).cos()),
    }
}

/// `|⟨(h₊ − h₋) p⟩|` by midpoint rule.
pub fn oracle_intensity(
    kind: DetectorKind,
    d: Detector,
    cfg: &ExperimentConfig,
    theta: f64,
) -> f64 {
    midpoint_mean(TAU / cfg.omega, |t| {
        density_terms(d, cfg, theta, t).0 * probability(kind, d, cfg, theta, t)
    })
    .abs()
}

pub fn oracle_intensities(kind: DetectorKind, cfg: &ExperimentConfig, theta: f64) -> [f64; 4] {
    Detector::ALL.map(|d| oracle_intensity(kind, d, cfg, theta))
}

/// θ-moments `(var12, var34, cov)` of the oracle intensities by midpoint rule.
pub fn oracle_moments(
    kind: DetectorKind,
    cfg: &ExperimentConfig,
    theta_points: usize,
) -> (f64, f64, f64) {
    let h = TAU / theta_points as f64;
    let pts: Vec<(f64, f64)> = (0..theta_points)
        .map(|k| {
            let i = oracle_intensities(kind, cfg, (k as f64 + 0.5) * h);
            (i[0] - i[1], i[2] - i[3])
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let vx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
    let vy = pts.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
    let c = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    (vx, vy, c)
}
