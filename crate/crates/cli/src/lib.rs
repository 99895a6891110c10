//! Configuration, presets and the fit driver behind the `ratfit` binary.

use std::path::PathBuf;

pub mod config;
pub mod presets;
pub mod run;

pub use config::{HingeSpec, Mode, RunConfig, TargetSpec};
pub use presets::{list_presets, preset};
pub use run::{fit, run, RunOptions, RunOutput, RunResult};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown preset {0:?} (see `ratfit presets`)")]
    UnknownPreset(String),

    #[error(transparent)]
    Core(#[from] ratfit_core::Error),
}

impl CliError {
    /// Process exit status: 2 config, 3 io, 4 no feasible level,
    /// 5 iteration limit, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use ratfit_core::Error as E;
        match self {
            CliError::Config(_) | CliError::UnknownPreset(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::EmptyInterval { .. }
                | E::InsufficientSamples { .. }
                | E::UncoveredInterval { .. }
                | E::InvalidSamples(_)
                | E::InvalidBasis { .. }
                | E::InvalidModel(_)
                | E::InvalidConfig(_)
                | E::Json(_) => 2,
                E::Io { .. } | E::Csv(_) => 3,
                E::NoFeasibleLevel { .. } => 4,
                E::IterationLimit { .. } => 5,
                _ => 1,
            },
        }
    }
}
