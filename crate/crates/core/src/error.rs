use thiserror::Error;

use crate::model::{Detector, Source};

/// Which homodyne pair a degenerate conditional mean belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomodynePair {
    /// D1/D2, read out as X.
    X,
    /// D3/D4, read out as Y.
    Y,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("distance must be positive and finite, got {0}")]
    NonPositiveDistance(f64),

    #[error("total density vanishes, the field is undefined at a dark point")]
    DarkPoint,

    #[error("source {emitter:?} does not reach detector {detector:?} in the interferometer")]
    Unreachable { emitter: Source, detector: Detector },

    #[error("amplitude-weighted absorption needs alpha + beta > 0")]
    ZeroAmplitude,

    #[error("integrand is not finite at abscissa {at}")]
    NonFinite { at: f64 },

    #[error("homodyne pair {0:?} receives no photons, its conditional mean is undefined")]
    DegenerateHomodyne(HomodynePair),

    #[error("at least two samples are required, got {0}")]
    TooFewSamples(u64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
