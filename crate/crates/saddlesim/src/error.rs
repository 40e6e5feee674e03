use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("unknown scenario `{0}` (expected one of: purity, expand, entangle-map, squeeze-metrology, feedback-recovery, stability-scan)")]
    UnknownScenario(String),

    #[error("physicality failure at I_L = {laguerre_fraction}, Ω/Ω₀ = {omega_ratio}: {source}")]
    Physics {
        laguerre_fraction: f64,
        omega_ratio: f64,
        source: saddle_core::Error,
    },

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl RunError {
    pub fn config(key: impl Into<String>, message: impl ToString) -> Self {
        RunError::Config {
            key: key.into(),
            message: message.to_string(),
        }
    }

    /// 2 for a state that left the physical region during a run, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Physics { .. } => 2,
            _ => 1,
        }
    }
}

/// Sorts a core error raised while running grid point `(il, ratio)`: numerical
/// breakdown of the state is a physicality failure, everything else a bad input.
pub(crate) fn classify(err: saddle_core::Error, key: &str, il: f64, ratio: f64) -> RunError {
    use saddle_core::Error as E;
    match err {
        E::Unphysical { .. } | E::NotPositiveDefinite | E::IntegrationFailure { .. } => RunError::Physics {
            laguerre_fraction: il,
            omega_ratio: ratio,
            source: err,
        },
        other => RunError::config(key, other),
    }
}
