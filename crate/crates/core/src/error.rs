use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is outside the supported range")]
    OutOfRange(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {p} exceeds the configured limit {limit}")]
    ModulusTooLarge { p: u64, limit: u64 },
    #[error("{d} does not divide p - 1 = {order}")]
    NotDivisor { d: u64, order: u64 },
    #[error("zero is not allowed as {0}")]
    ZeroElement(&'static str),
    #[error("sets live in different fields (p = {left} vs p = {right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("element {x} is not a residue modulo {p}")]
    ElementOutOfRange { x: u64, p: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),
    #[error("shift {0} is repeated")]
    DuplicateShift(u32),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
