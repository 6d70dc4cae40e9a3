use thiserror::Error;

pub type Result<T, E = OcrsError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OcrsError {
    #[error("dimension mismatch: expected ground size {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("weight for element {element} is negative ({value})")]
    NegativeWeight { element: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("element {element} is never active under the prior")]
    ZeroActivation { element: usize },

    #[error("{what} is too large for exhaustive treatment ({size} > {limit})")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// No element of `S_i` met the selection threshold. `partial` holds the
    /// suffix `π(i+1), ..., π(n)` fixed before the failure.
    #[error("no qualifying element at step {step} (partial order suffix {partial:?})")]
    NoQualifyingElement { step: usize, partial: Vec<usize> },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
}
