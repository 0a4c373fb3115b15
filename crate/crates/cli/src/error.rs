use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration. Exit code 2.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    /// A toolkit operation failed. Exit code 3.
    #[error("{operation} failed: {source}")]
    Computation {
        operation: &'static str,
        #[source]
        source: damped_spectra::Error,
    },

    /// Results could not be written. Exit code 3.
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Computation { .. } | CliError::Output { .. } => 3,
        }
    }
}

/// Tags a core error with the operation that raised it.
pub(crate) trait Context<T> {
    fn during(self, operation: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for damped_spectra::Result<T> {
    fn during(self, operation: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Computation { operation, source })
    }
}
