use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: udn_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical { .. } => 4,
            CliError::Io { .. } => 5,
        }
    }

    /// Wraps an engine error raised while computing `context`. Domain and
    /// window errors are input problems and map to validation failures.
    pub fn engine(context: impl Into<String>, source: udn_core::Error) -> Self {
        let context = context.into();
        match source {
            udn_core::Error::Domain(_) | udn_core::Error::WindowTooSmall { .. } => {
                CliError::Validation(format!("{context}: {source}"))
            }
            source => CliError::Numerical { context, source },
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
