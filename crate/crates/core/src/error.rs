use crate::ground::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("function is not submodular: f(S+i) + f(S+j) < f(S+i+j) + f(S) at S = {set}, i = {i}, j = {j}")]
    NonSubmodular { set: Subset, i: usize, j: usize },

    #[error("f(∅) must be 0")]
    EmptyNotZero,

    #[error("negative value at {0}")]
    NegativeValue(Subset),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ground set of size {n} exceeds the limit of {max}")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error("minimum-norm-point SFM not certified after {major_cycles} major cycles")]
    NotConverged { major_cycles: usize },

    #[error("starting point {lambda0} lies below the optimum")]
    BadStart { lambda0: String },

    #[error("cutting-plane engine hit its iteration cap of {cap}")]
    IterationCapExceeded { cap: usize },

    #[error("cutting-plane engine numerical breakdown after {iterations} iterations")]
    EngineBreakdown { iterations: usize },

    #[error("base-polytope line search infeasible: {0}")]
    InfeasibleBaseLineSearch(String),

    #[error("base-polytope cutting-plane check disagrees: {0}")]
    BaseVerificationMismatch(String),

    #[error("oracle contract violated: {0}")]
    InvariantViolation(String),
}
