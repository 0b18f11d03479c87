use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `n` exceeds the cap for atom-level (exponential) representations.
    #[error("{n} events exceeds the atom-level cap of {max}")]
    TooManyEvents { n: usize, max: usize },

    /// The partial information violates one of its structural invariants.
    #[error("invalid partial information: {0}")]
    InvalidInfo(String),

    /// The weight vector violates the nonzero subset-sum condition.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),

    /// The partial information cannot come from any probability space.
    #[error("inconsistent information: {0}")]
    InconsistentInfo(String),

    #[error("x = {x} is outside the feasibility window for event {i}")]
    InfeasibleX { i: usize, x: f64 },

    #[error("no subset satisfies the selection constraint")]
    NoFeasibleSubset,

    #[error("resolution {0} is too coarse for this threshold")]
    ResolutionTooCoarse(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Whether the error certifies that the inputs are not realizable, as
    /// opposed to being malformed.
    pub fn is_inconsistency(&self) -> bool {
        matches!(self, Error::InconsistentInfo(_) | Error::InfeasibleX { .. })
    }
}
