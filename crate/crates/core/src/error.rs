use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: String, modulus: u64 },
    #[error("pair degenerate at q = {q}")]
    DegeneratePair { q: u64 },
    #[error("pair/params inconsistent: {0}")]
    Inconsistent(String),
    #[error("{m} does not divide the multiplicative group order {order}")]
    OrderNotDividing { m: String, order: String },
    #[error("element is not in the subgroup of p-th roots of unity (p = {p})")]
    NotInMuP { p: u64 },
    #[error("symbol undefined at the prime: argument is zero in the residue field")]
    SymbolUndefined,
    #[error("excluded case n = 2p, use check_special")]
    ExcludedCase,
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("io: {0}")]
    Io(String),
    /// The reader of an output stream went away.
    #[error("broken pipe")]
    BrokenPipe,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Error::BrokenPipe;
        }
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe) {
            return Error::BrokenPipe;
        }
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
