use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} must be a positive integer")]
    Zero(&'static str),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("splitting symbol must be -1, 0 or 1, got {0}")]
    InvalidSymbol(i64),

    /// The orbit-count formula only covers fields whose only roots of unity
    /// are +1 and -1, which excludes Q(sqrt(-3)) and Q(i).
    #[error(
        "discriminant {0} is unsupported: Q(sqrt({0})) has roots of unity other than +1 and -1"
    )]
    UnsupportedField(i64),

    #[error("volcano with p={p}, depth={depth} has more than {cap} vertices")]
    TooLarge { p: u64, depth: u32, cap: usize },

    #[error("volcano depth {depth} is too shallow for a walk needing depth {needed}")]
    InsufficientDepth { depth: u32, needed: u32 },
}
