use unigame_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

impl CliError {
    /// 2 parse/input, 3 resource limit, 4 solver failure, 5 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::SizeLimitExceeded { .. } | Error::InsufficientRadius { .. } => 3,
                Error::NoDescent { .. }
                | Error::BracketFailure { .. }
                | Error::Unbalanced { .. }
                | Error::NoConvergence { .. }
                | Error::DivergentTail { .. }
                | Error::PairingFailed { .. } => 4,
                Error::PropertyViolated(_) => 5,
                _ => 2,
            },
            CliError::Read { .. } | CliError::Usage(_) => 2,
            CliError::Verification(_) => 5,
        }
    }
}
