use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },

    /// A point outside the region where a constraint family is defined,
    /// e.g. a non-positive coordinate fed to the negative entropy.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("no finite bound for {0}")]
    Unbounded(String),

    #[error("learner does not fit this problem: {0}")]
    LearnerMismatch(String),

    #[error("no stopping threshold below 2^62")]
    ThresholdOverflow,

    #[error("grid oracle needs n <= 3, got n = {0}")]
    GridTooLarge(usize),

    #[error("width {omega} is below the observed |f| = {observed}")]
    WidthTooSmall { omega: f64, observed: f64 },
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context, expected, found })
    }
}
