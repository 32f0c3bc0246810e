use setvalue_core::Error;

/// Failures of a command, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{what}: {required} exceeds the cap {cap}")]
    Cap { what: String, required: u128, cap: u128 },
    #[error("{0}")]
    Numeric(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io(_) => 2,
            Self::Cap { .. } => 3,
            Self::Numeric(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::Io(_) => "io",
            Self::Cap { .. } => "cap",
            Self::Numeric(_) => "numeric",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { what, required, cap } => Self::Cap {
                what: what.to_string(),
                required,
                cap,
            },
            Error::Numeric(m) => Self::Numeric(m),
            other => Self::Validation(other.to_string()),
        }
    }
}
