//! Configuration, orchestration and result output for the `lhv-photons`
//! command-line tool.

pub mod config;
pub mod error;
pub mod record;
pub mod runs;

use std::path::PathBuf;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use record::{Command, ResultRecord};

/// Resolves where a record goes: the configured path, else
/// `$LHV_PHOTONS_OUT_DIR/<command>.<ext>`, else stdout (`None`).
pub fn destination(config: &RunConfig, command: Command) -> Option<PathBuf> {
    if let Some(p) = &config.output.path {
        return Some(p.clone());
    }
    std::env::var_os(config::OUT_DIR_ENV).map(|dir| {
        PathBuf::from(dir).join(format!(
            "{}.{}",
            command.as_str(),
            config.output.format.extension()
        ))
    })
}

/// Runs `command` and writes the record to its destination.
pub fn execute(command: Command, config: &RunConfig) -> Result<ResultRecord> {
    let record = runs::run(command, config)?;
    let text = record.render(config.output.format);
    match destination(config, command) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| HarnessError::Io {
                    path: parent.to_path_buf(),
                    source: e,
                })?;
            }
            std::fs::write(&path, text).map_err(|e| HarnessError::Io { path, source: e })?;
        }
        None => print!("{text}"),
    }
    Ok(record)
}
