use std::fmt;
use std::path::Path;

/// Failure of a command run. Usage and input problems exit with 2, solver
/// errors and failed `--check` comparisons with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(divflow_core::Error),
    Check(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Usage(format!("{}: {e}", path.display()))
    }

    pub fn csv(path: &Path, e: csv::Error) -> Self {
        CliError::Usage(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Check(_) => 1,
        }
    }

    /// Stable name printed ahead of the message.
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Core(e) => e.name(),
            CliError::Check(_) => "CheckFailed",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Check(m) => write!(f, "{}: {m}", self.name()),
            CliError::Core(e) => write!(f, "{}: {e}", self.name()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<divflow_core::Error> for CliError {
    fn from(e: divflow_core::Error) -> Self {
        CliError::Core(e)
    }
}
