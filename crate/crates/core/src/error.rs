use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p-adic precision exhausted")]
    PrecisionExhausted,
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("prime {0} is not supported (need an odd prime)")]
    InvalidPrime(u32),
    #[error("precision {requested} exceeds the capacity {capacity} for p = {p}")]
    PrecisionTooLarge { p: u32, requested: u32, capacity: u32 },
    #[error("operands use different primes or precision contexts")]
    ContextMismatch,
    #[error("value does not lie in the base field")]
    NotInBaseField,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("matrix or basis is rank deficient")]
    RankDeficient,
    #[error("enumeration budget of {0} candidates exceeded")]
    EnumerationBudgetExceeded(usize),
    #[error("element is not regular semisimple")]
    NotRegularSemisimple,
    #[error("degenerate Gram matrix")]
    DegenerateGram,
    #[error("retry budget exceeded while sampling")]
    RetryBudgetExceeded,
    #[error("Cayley map undefined: 1 - d is not invertible")]
    SingularCayley,
    #[error("element is not a twisting element for gamma")]
    BadTwist,
    #[error("element is not integral")]
    NotIntegral,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("no norm-one twist makes 1 - xi d a unit")]
    TwistSearchExhausted,
    #[error("input outside the supported regime: {0}")]
    RegimeMismatch(String),
    #[error("uniqueness violated: {0}")]
    NonUnique(String),
    #[error("cyclotomic depth {0} exceeds the configured bound")]
    CyclotomicDepthExceeded(u32),
    #[error("character is not affine on the coset")]
    NonClosedTerm,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
