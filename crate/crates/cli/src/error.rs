use thiserror::Error;

/// Everything that can end a run early, with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or missing parameter, found before any computation.
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] edgezeta::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// `verify` found failing checks.
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use edgezeta::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Domain(_) | E::Undersampled { .. }) => 2,
            CliError::Core(E::Resource(_)) => 3,
            CliError::Core(E::Consistency(_)) | CliError::VerifyFailed(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn config<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}
