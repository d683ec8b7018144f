use std::fmt;

/// Failure of a CLI invocation, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or unparsable config or manifest.
    Input(String),
    /// A config field with an inadmissible value.
    Invalid { field: String, reason: String },
    /// The run hit non-finite values; partial artifacts were written.
    BlowUp { t: f64 },
    Io(std::io::Error),
    Numerics(fbl_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invalid { .. } => 3,
            CliError::BlowUp { .. } => 4,
            CliError::Io(_) | CliError::Numerics(_) => 1,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Invalid { field, reason } => write!(f, "invalid config field `{field}`: {reason}"),
            CliError::BlowUp { t } => write!(f, "numerical blow-up at t = {t}; partial artifacts written"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<fbl_core::Error> for CliError {
    fn from(e: fbl_core::Error) -> Self {
        match e {
            fbl_core::Error::Parameter { name, reason } => CliError::invalid(name, reason),
            other => CliError::Numerics(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
