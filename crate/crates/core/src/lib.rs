//! A local particle model of photons in a double-homodyne Bell experiment.
//!
//! Photons carry a `±` state and interfere only at absorption. Three routes
//! compute the homodyne correlations and cross-check one another:
//!
//! * [`analytic`] closed forms for the detector intensities and their
//!   moments over the hidden source phase,
//! * [`analytic`] quadrature of the time-averaged expected counts under any
//!   of the three detector laws in [`model`],
//! * [`counts`] Monte Carlo of discrete ±1 counts, conditionally
//!   independent given the hidden phase.
//!
//! [`bell`] evaluates CHSH statistics on any of these correlations.

pub mod analytic;
pub mod bell;
pub mod counts;
pub mod error;
pub mod model;
pub mod quadrature;

pub use error::{Error, Result};
