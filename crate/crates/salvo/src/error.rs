use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// The run completed but some interceptor never reached the target.
    pub const MISSION_FAILURE: u8 = 1;
    /// Scenario or trajectory file could not be parsed or failed validation.
    pub const INVALID: u8 = 2;
    /// The integration produced a non-finite state.
    pub const NUMERICAL: u8 = 3;
    /// Reading or writing a file failed.
    pub const IO: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Malformed scenario document; the message carries line/field details.
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    /// Trajectory file does not follow the documented schema.
    #[error("{origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("'{0}' is neither a readable file nor a preset (presets: {1})")]
    UnknownScenario(String, String),
    #[error("override '{spec}': {reason}")]
    Override { spec: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] salvo_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use salvo_core::Error as E;
        match self {
            AppError::Core(E::NonFinite { .. } | E::AtTarget { .. }) => exit::NUMERICAL,
            AppError::Io { .. } => exit::IO,
            _ => exit::INVALID,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
