use std::fmt;

use motkit::ErrorKind;

/// Everything a command can fail with, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (exit 2).
    Input(String),
    /// Library error; its kind decides between exit 2 and 3.
    Lib(motkit::Error),
    /// A failed self-check (exit 3).
    Check(String),
    /// File system error with the path involved (exit 1).
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Lib(e) => match e.kind() {
                ErrorKind::InvalidInput => 2,
                ErrorKind::Numerical => 3,
            },
            CliError::Check(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Check(m) => write!(f, "self-check failed: {m}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl From<motkit::Error> for CliError {
    fn from(e: motkit::Error) -> Self {
        CliError::Lib(e)
    }
}
