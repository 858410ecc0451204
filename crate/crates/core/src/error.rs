use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^63")]
    NotPrime(u64),
    #[error("unsupported prime size {0} bits (only 62 is supported)")]
    UnsupportedPrimeBits(u32),
    #[error("sample is singular or non-generic")]
    SingularSample,
    #[error("no root found on the restricted line")]
    NoRootFound,
    #[error("sampler exhausted after {attempts} attempts: {last}")]
    SampleExhausted { attempts: usize, last: String },
    #[error("projection center contains the variety")]
    CenterContainsVariety,
    #[error("operation needs a fully parametric variety")]
    NotParametric,
    #[error("degree {d} is below the minimum r - n + 1 for r = {r}, n = {n}")]
    MinimalDegreeViolated { r: usize, n: usize, d: usize },
    #[error("family {0} is not constructible: {1}")]
    NotConstructible(String, String),
    #[error("secant variety of order {0} already fills the ambient space")]
    FillsAmbient(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid variety: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    /// Errors which a fresh random sample may avoid.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::SingularSample | Error::NoRootFound)
    }
}
