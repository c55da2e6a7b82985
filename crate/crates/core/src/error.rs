use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The conditional generator needs at least two points per class.
    #[error("insufficient class data: {positive} positive and {negative} negative points (need >= 2 each)")]
    InsufficientClassData { positive: usize, negative: usize },

    #[error("non-positive estimated variance {value} at coordinate {index}")]
    NonPositiveVariance { index: usize, value: f64 },

    #[error("numeric 1-D oracle requires dim = 1, got {0}")]
    UnsupportedDimension(usize),

    #[error("gamma grid is empty")]
    EmptyGrid,

    #[error("real dataset redraw exhausted after {attempts} attempts (d={d}, m_S={m_s}, trial={trial_index})")]
    RedrawExhausted {
        attempts: u32,
        d: usize,
        m_s: u64,
        trial_index: u64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
