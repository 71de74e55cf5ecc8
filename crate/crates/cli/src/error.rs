use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("numerical error{}: {message}", .t.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Numerical { t: Option<f64>, message: String },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<copreli::Error> for CliError {
    fn from(e: copreli::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical {
                t: e.time(),
                message: e.to_string(),
            }
        } else {
            CliError::Config(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
