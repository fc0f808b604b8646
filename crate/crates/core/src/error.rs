use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field of size {size} exceeds the configured cap {cap}")]
    FieldTooLarge { size: u128, cap: u64 },

    #[error("orbit order {order} exceeds the configured cap {cap} (q = {q}, d_a = {d_a})")]
    OrbitOrderCap { q: u64, d_a: u64, order: u64, cap: u64 },

    #[error("direct summation over a field of size {size} exceeds the cap {cap}")]
    DirectSumCap { size: u64, cap: u64 },

    #[error("brute-force enumeration of {work} points exceeds the budget {budget}")]
    BudgetExceeded { work: u128, budget: u128 },

    #[error("discrete log of zero")]
    ZeroLog,

    #[error("degree {sub} does not divide {n}")]
    NotSubfield { sub: u32, n: u32 },

    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(usize, usize),

    #[error("{a} is not coprime to {m}")]
    NotCoprime { a: i64, m: u64 },

    #[error("tuple {0:?} is not in the required set")]
    NotInSet(Vec<u64>),

    #[error("set is not stable under multiplication by {0}")]
    NotStable(u64),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised by a configured size or work limit.
    pub fn is_cap_violation(&self) -> bool {
        matches!(
            self,
            Error::FieldTooLarge { .. }
                | Error::OrbitOrderCap { .. }
                | Error::DirectSumCap { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}
