use thiserror::Error;

/// Failure classes of a run; each maps to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments, found before anything is computed.
    #[error("{0}")]
    Validation(String),
    /// A numerical module failed; the message is the module's own.
    #[error("{0}")]
    Numerical(#[from] tubelab::Error),
    /// A computed check missed its tolerance.
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) | CliError::Check(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}
