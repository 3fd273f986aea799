use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(mpemba_core::Error),
    #[error("protocol not applicable: {0}")]
    Protocol(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Model(_) => 3,
            CliError::Protocol(_) => 4,
        }
    }
}

impl From<mpemba_core::Error> for CliError {
    fn from(e: mpemba_core::Error) -> Self {
        use mpemba_core::Error as E;
        match e {
            E::InvalidPermutation(msg) => CliError::Protocol(msg),
            E::RealSlowestMode => CliError::Protocol(e.to_string()),
            E::InvalidGrid(msg) => CliError::Config(msg),
            other => CliError::Model(other),
        }
    }
}
