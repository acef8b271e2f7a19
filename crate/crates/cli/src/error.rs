use std::fmt;
use std::path::Path;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// A verification or report invariant failed (exit 1).
    Verification(String),
    /// Bad flags, unreadable or malformed files (exit 2).
    Input(String),
    /// The instance is too large to simulate or enumerate (exit 3).
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }

    pub fn io_at(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    /// Wraps an engine error with what was being done.
    pub fn core(context: &str) -> impl Fn(qic_core::Error) -> CliError + '_ {
        move |e| {
            let msg = format!("{context}: {e}");
            if e.is_resource_limit() {
                CliError::Resource(msg)
            } else {
                CliError::Input(msg)
            }
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
