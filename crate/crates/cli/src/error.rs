use std::fmt;

/// Failure of one invocation, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable or malformed configuration, invalid flags or
    /// parameters. Exit code 2.
    Config(String),
    /// The computation itself failed. Exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Prefix a configuration message with the field it concerns.
    pub fn at(self, field: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{field}: {m}")),
            other => other,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<decohere_core::Error> for CliError {
    fn from(e: decohere_core::Error) -> Self {
        if e.is_validation() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
