use alloc::string::String;
use core::fmt;

/// Why a topology was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    NoFollowers,
    SelfLoop(usize),
    DuplicateEdge(usize, usize),
    IndexOutOfRange { index: usize, n_followers: usize },
    NoLeaderTarget,
    Disconnected,
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::NoFollowers => write!(f, "topology has no followers"),
            TopologyError::SelfLoop(i) => write!(f, "self-loop on follower {}", i + 1),
            TopologyError::DuplicateEdge(i, j) => {
                write!(f, "duplicate edge between followers {} and {}", i + 1, j + 1)
            }
            TopologyError::IndexOutOfRange { index, n_followers } => {
                write!(f, "follower index {} out of range (1..={})", index + 1, n_followers)
            }
            TopologyError::NoLeaderTarget => {
                write!(f, "leader must broadcast to at least one follower")
            }
            TopologyError::Disconnected => write!(f, "follower graph is not connected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Topology(TopologyError),
    /// Input to the symmetric eigensolver was not symmetric.
    NotSymmetric {
        row: usize,
        col: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Kinematics evaluated at or through the target.
    AtTarget {
        r: f64,
    },
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// Scenario failed validation; the message names the violated condition.
    Validation(String),
    /// An interceptor state became NaN or infinite.
    NonFinite {
        interceptor: String,
        t: f64,
    },
}

impl From<TopologyError> for Error {
    fn from(e: TopologyError) -> Self {
        Error::Topology(e)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Topology(e) => write!(f, "invalid topology: {e}"),
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::AtTarget { r } => write!(f, "interceptor is at the target (r = {r})"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::Validation(msg) => write!(f, "validation failed: {msg}"),
            Error::NonFinite { interceptor, t } => {
                write!(f, "non-finite state for interceptor {interceptor} at t = {t}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
