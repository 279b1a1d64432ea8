//! Error type of the harness with its stable exit-code mapping:
//! 0 success, 2 usage/config, 3 domain, 4 runtime divergence, 5 I/O.

use std::path::PathBuf;

use thermoreg_core::Error as CoreError;

/// Process exit codes the binary commits to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
    Domain = 3,
    Divergence = 4,
    Io = 5,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run {run_id} diverged: {source}")]
    RunDiverged {
        run_id: String,
        #[source]
        source: CoreError,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Config(_) => ExitCode::Usage,
            CliError::Core(core) => match core {
                CoreError::ConvergenceFailure(..) | CoreError::Diverged { .. } => {
                    ExitCode::Divergence
                }
                _ => ExitCode::Domain,
            },
            CliError::Io { .. } => ExitCode::Io,
            CliError::RunDiverged { .. } => ExitCode::Divergence,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
