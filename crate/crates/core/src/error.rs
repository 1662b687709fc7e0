use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("power iteration did not converge after {iterations} iterations (bracket width {width:e})")]
    NonConvergence { iterations: usize, width: f64 },

    #[error("matrix is reducible: its digraph is not strongly connected")]
    ReducibleMatrix,

    #[error("eta = {eta} outside the open interval (0, {max})")]
    EtaOutOfRange { eta: f64, max: f64 },

    #[error("mu = {mu} outside the admissible range: {reason}")]
    MuOutOfRange { mu: f64, reason: String },

    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },

    #[error("q = {q} must exceed the maximum degree {max_degree}")]
    QTooSmall { q: usize, max_degree: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("entry {value} has no exact rational form with denominator at most {cap}")]
    IrrationalEntries { value: f64, cap: i64 },

    #[error("bound vectors have length {found}, expected {expected}")]
    BoundsMismatch { expected: usize, found: usize },

    #[error("gamma = {0} outside (0, 1]")]
    GammaOutOfRange(f64),

    #[error("kappa = {kappa} exceeds alpha / 2 = {half_alpha}")]
    KappaExceedsHalfAlpha { kappa: f64, half_alpha: f64 },

    #[error("maximum degree {delta} is below the required {required}")]
    DeltaTooSmall { delta: usize, required: f64 },

    #[error("no certificate: {0}")]
    NoCertificate(String),

    #[error("no legal color at site {site}")]
    NoLegalColor { site: usize },

    #[error("state space of size {size} exceeds cap {cap}")]
    StateSpaceTooLarge { size: u128, cap: usize },

    #[error("local enumeration of size {size} exceeds cap {cap}")]
    CapExceeded { size: u128, cap: usize },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}
