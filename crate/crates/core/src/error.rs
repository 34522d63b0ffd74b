use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("exponent must be at least 1, got {0}")]
    BadExponent(u32),
    #[error("structure size {q} exceeds the configured limit {limit}")]
    StructureTooLarge { q: u64, limit: u64 },
    #[error("no irreducible polynomial of degree {degree} over F_{p}")]
    NoIrreducible { p: u64, degree: u32 },
    #[error("element {repr} is out of range for a structure of size {q}")]
    ElementOutOfRange { repr: u64, q: u64 },
    #[error("element {0} is not a unit")]
    NotAUnit(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("structure mismatch: {0} vs {1}")]
    StructureMismatch(String, String),
    #[error("invalid structure literal {0:?}")]
    BadStructureLiteral(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("requested {n} points but the space only has {size}")]
    SampleTooLarge { n: u64, size: u64 },
    #[error("space of {size} points exceeds the enumeration bound {bound}")]
    SpaceTooLarge { size: u64, bound: u64 },
    #[error("brute force needs {required} tuple visits, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("chain length k must be at least 1")]
    EmptyChain,
    #[error("k = {k} exceeds the decomposition cap {cap}")]
    ChainTooLong { k: usize, cap: usize },
    #[error("policy {0} is not supported by the transfer recurrence; use brute force")]
    UnsupportedPolicy(&'static str),
    #[error("arithmetic overflow in exact integer type")]
    Overflow,
    #[error("{0}")]
    Precondition(String),
}
