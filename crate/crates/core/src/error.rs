use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument that must be finite was NaN or infinite.
    #[error("non-finite input: {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// Parameter vector length and feature dimension disagree.
    #[error("dimension mismatch: parameter vector has length {theta_len}, expected {expected} for {feature_dim} feature(s)")]
    DimensionMismatch {
        theta_len: usize,
        expected: usize,
        feature_dim: usize,
    },

    /// A tuning parameter or option is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A label was not 0 or 1.
    #[error("invalid label: {0} (labels must be 0 or 1)")]
    InvalidLabel(u8),

    /// A dataset violated a structural invariant.
    #[error("invalid dataset: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { name, value })
        }
    }

    pub(crate) fn check_label(y: u8) -> Result<u8> {
        if y <= 1 {
            Ok(y)
        } else {
            Err(Error::InvalidLabel(y))
        }
    }
}
