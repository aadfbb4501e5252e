use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] lhv_photons::Error),

    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Prefixes a model parameter error with its config section.
    pub fn model_field(section: &str, err: lhv_photons::Error) -> Self {
        match err {
            lhv_photons::Error::InvalidParameter { name, reason } => {
                HarnessError::field(format!("{section}.{name}"), reason)
            }
            other => HarnessError::Model(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
