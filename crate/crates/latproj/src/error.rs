use num_bigint::BigInt;

/// Errors shared across the crate. CLI exit codes are derived from these:
/// parse/io problems map to 3, violated preconditions to 2, and failed
/// verification checks to 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("matrix is not triangular")]
    NotTriangular,

    #[error("not a lattice vector: {0}")]
    NotLatticeVector(String),

    #[error("set is not primitive (minor gcd {0})")]
    NotPrimitive(BigInt),

    #[error("extension does not complete a basis (determinant {0})")]
    BadExtension(BigInt),

    #[error("membership round-trip failed: {0}")]
    MembershipFailure(String),

    #[error("dimension {0} exceeds enumeration cap {1}")]
    DimensionTooLarge(usize, usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 3,
            _ => 2,
        }
    }
}
