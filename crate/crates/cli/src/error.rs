use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("run diverged at t = {t_crash}: {reason}")]
    Diverged { t_crash: f64, reason: String },

    #[error("{0}")]
    Size(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}

impl From<voladapt::Error> for CliError {
    fn from(e: voladapt::Error) -> Self {
        use voladapt::Error as E;
        match e {
            E::Config(msg) => CliError::Config(msg),
            E::InvalidDegree(_) => CliError::Config(e.to_string()),
            E::Size { .. } => CliError::Size(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Diverged { .. } => 3,
            CliError::Size(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        })
    }
}
