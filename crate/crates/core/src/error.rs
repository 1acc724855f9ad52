use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A problem exceeds a guardrail (enumeration size, modulus width, ...).
    #[error("capacity exceeded: {what} is {actual}, limit is {limit}")]
    Capacity {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("no closed form for exponent e = {0}; use the convolution or naive oracle")]
    UnsupportedExponent(u32),

    #[error("{0} is not a root modulo {1}")]
    NotARoot(u64, u64),

    #[error("derivative vanishes modulo {1} at {0}")]
    SingularDerivative(u64, u64),

    #[error("lifting hypothesis violated: {0}")]
    Hypothesis(String),

    /// Two evaluation routes disagreed on a count.
    #[error("methods disagree: {0}")]
    Mismatch(String),

    /// An identity that must hold exactly did not. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, limit: u128, actual: u128) -> Self {
        Error::Capacity {
            what,
            limit,
            actual,
        }
    }
}
