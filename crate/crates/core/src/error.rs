use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("null state")]
    NullState,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("degenerate basis: {0} requires m > 0")]
    DegenerateBasis(&'static str),

    #[error("uncorrectable state shape")]
    UncorrectableShape,

    #[error("{leaves} branches exceed the enumeration budget of {budget}; use Monte Carlo mode")]
    BranchBudget { leaves: u128, budget: u128 },

    #[error("unknown protocol `{name}`; registered: {registered}")]
    UnknownProtocol { name: String, registered: String },

    #[error("unknown formula `{0}`")]
    UnknownFormula(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by bad caller input rather than by the simulator.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
