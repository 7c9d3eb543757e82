use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("singular Weierstrass model (discriminant is zero)")]
    SingularModel,
    #[error("{p} is a prime of bad reduction")]
    BadReduction { p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("squarefree part of zero is undefined")]
    ZeroInput,
    #[error("operation requires an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("group order ambiguous at p = {p} after exhausting retries")]
    AmbiguousOrder { p: u64 },
    #[error("point is not on the curve")]
    PointOffCurve,
    #[error("matrix {0:?} is not invertible mod {1}")]
    NonInvertibleElement([u64; 4], u64),
    #[error("levels {0} and {1} are not coprime")]
    NonCoprimeLevels(u64, u64),
    #[error("element list is not closed under multiplication mod {0}")]
    NotAGroup(u64),
    #[error("closed-form Euler factor is only available for L = 2 or 3, got {0}")]
    UnsupportedLength(u32),
    #[error("lower integration limit must be >= 2, got {0}")]
    BadIntegrationLimit(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
