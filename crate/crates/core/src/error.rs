use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("matrix is not positive semidefinite")]
    NotPositiveSemidefinite,

    #[error("all particle weights are zero or non-finite")]
    WeightUnderflow,

    #[error("slice sampler exceeded {0} step-out iterations")]
    StepOutExceeded(usize),

    #[error("slice sampler failed to shrink onto the slice after {0} proposals")]
    ShrinkExhausted(usize),

    #[error("polynomial exponent {degree} exceeds bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grids differ or q has zero mass where p is positive")]
    SupportViolation,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("log density is non-finite at every grid point")]
    NonFiniteDensity,

    #[error("config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics or I/O.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
