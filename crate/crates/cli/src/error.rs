use std::io;
use std::path::PathBuf;

use f13_core::conformal::ConformalError;
use f13_core::frame::FrameError;
use f13_core::numerics::NumericsError;
use f13_core::state::ProviderError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

impl CliError {
    /// 2 for bad configuration or input, 3 for failures while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Provider(ProviderError::Table(_)) => 2,
            CliError::Numerics(NumericsError::TooFewSamples { .. }) => 2,
            _ => 3,
        }
    }
}

pub fn read(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
