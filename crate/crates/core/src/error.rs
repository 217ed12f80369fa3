use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A structural parameter (dimension, grid order, time, exponent) is invalid.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A field is not positive enough for a power or logarithm.
    #[error("positivity violated: minimum {min:e} is not above floor {floor:e}")]
    Positivity { min: f64, floor: f64 },

    /// A theorem parameter lies outside its admissible set.
    #[error("{what} = {value} outside admissible range {range}")]
    Range {
        what: &'static str,
        value: f64,
        range: String,
    },

    /// A computation produced a non-finite value or lost resolution.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Every optimizer start stopped without meeting the convergence test.
    #[error("no multistart converged (best ratio {best_ratio})")]
    Convergence { best_ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
