//! Fatal runner errors and their exit codes. Per-sample failures inside a
//! sweep are not errors; they are recorded in the outputs and the run
//! continues.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Unusable configuration (bad file, bad flag combination, bad grid).
    Config(String),
    /// Filesystem problem with inputs or the output directory.
    Io(String),
    /// Core failure outside the per-sample scope.
    Core(qrc_core::CoreError),
}

impl CliError {
    /// 0 success, 1 usage/config error, 2 validation failure. Validation
    /// failures exit through the validate experiment, not through this type.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Core(e) => write!(f, "core error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qrc_core::CoreError> for CliError {
    fn from(e: qrc_core::CoreError) -> Self {
        CliError::Core(e)
    }
}
