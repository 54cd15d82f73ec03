use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{what} of size {size} exceeds the cap {cap}")]
    SizeCap { what: &'static str, size: u128, cap: u128 },
    #[error("basis function {basis} has no table entry for congestion {value}")]
    TableMiss { basis: usize, value: String },
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("solver failure: {0}")]
    Solver(String),
    /// A guaranteed property failed at runtime. Always a bug, never a result.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::Invalid(format!($($arg)*))
    };
}

pub(crate) use invalid;
