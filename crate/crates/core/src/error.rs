use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of order {p}^{m} exceeds the configured bound {bound}")]
    DegreeTooLarge { p: u64, m: usize, bound: u64 },
    #[error("no monic irreducible polynomial of degree {m} over F_{p} was found")]
    NoIrreducibleFound { p: u64, m: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedContexts,
    #[error("{0} is not the order of a subfield")]
    InvalidSubfield(u64),
    #[error("power class {0} is not supported (only 2 and 4)")]
    UnsupportedK(u32),
    #[error("wrong characteristic: {0}")]
    WrongCharacteristic(&'static str),
    #[error("evaluator produced image {image} outside a domain of size {size}")]
    ImageOutOfDomain { image: u64, size: u64 },
    #[error("domain of size {size} exceeds the limit {limit}")]
    DomainTooLarge { size: u64, limit: u64 },
    #[error("map failed the sampled additivity check")]
    NotAdditive,
    #[error("exponent {0} is out of range")]
    ExponentOutOfRange(u64),
    #[error("family kind does not match the evaluation context")]
    KindContextMismatch,
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("trace Gram matrix is singular")]
    SingularGram,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("component z-degree reaches the field order; only a value table is available")]
    DegreeOverflow,
    #[error("gamma is not in the base field")]
    GammaNotInSubfield,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
