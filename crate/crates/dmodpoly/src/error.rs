//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
    #[error("both inputs are zero")]
    BothZero,
    #[error("polynomial is not monic: {0}")]
    NotMonic(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero input")]
    ZeroInput,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value does not lie in the open unit ball")]
    NotInUnitBall,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("denominator too small: {0}")]
    SmallD(String),
    #[error("insufficient precision: {0}")]
    PrecisionInsufficient(String),
    #[error("iteration cap exceeded: {0}")]
    IterationCapExceeded(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("vertex not in canonical form: {0}")]
    NonCanonicalVertex(String),
    #[error("torsion is not etale: {0}")]
    TorsionNotEtale(String),
    #[error("kernel polynomial is not q-linearized")]
    NonLinearizedKernel,
    #[error("nonzero remainder in skew division")]
    NonzeroRemainder,
    #[error("no witness found: {0}")]
    WitnessNotFound(String),
    #[error("the field characteristic divides the level")]
    CharDividesN,
    #[error("not a point of the upper half plane: {0}")]
    NotOmegaPoint(String),
    #[error("unknown suite: {0}")]
    SuiteUnknown(String),
    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command line surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::UnsupportedField(_) => 3,
            Error::SizeCapExceeded(_) | Error::IterationCapExceeded(_) => 4,
            _ => 1,
        }
    }
}
