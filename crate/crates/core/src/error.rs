use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error("multiple edges between {u} and {v}")]
    MultiEdge { u: usize, v: usize },

    #[error("vertex {vertex} has degree {degree}, outside [{min}, {max}]")]
    DegreeOutOfRange {
        vertex: usize,
        degree: usize,
        min: usize,
        max: usize,
    },

    #[error("vertex index {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("empty edge list")]
    EmptyGraph,

    #[error("graph text: {0}")]
    Parse(String),

    #[error("path count {count} at length {k} exceeds budget {cap}")]
    PathBudgetExceeded { k: usize, count: u128, cap: u64 },

    #[error("pairing model gave no simple connected graph after {restarts} restarts")]
    RejectionBudgetExceeded { restarts: usize },

    #[error("invalid ensemble configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolve failed: {0}")]
    EigensolveFailure(String),

    #[error("size {n} exceeds the dense-solve cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },

    #[error("spectral parameter has Im = {im}, must be nonzero")]
    RealAxisParameter { im: f64 },

    #[error("fixed point did not converge in {iterations} iterations at eta = {eta} (last step {last_step:e})")]
    NoConvergence {
        iterations: usize,
        eta: f64,
        last_step: f64,
    },

    #[error("iterate left the lower half-plane on edge {edge} (Im = {im:e})")]
    HalfPlaneViolation { edge: usize, im: f64 },

    #[error("k = 0 observables have no edge form; use the vertex pairing")]
    KZeroNotEdgeBased,

    #[error("observable value {value} exceeds sup bound {bound}")]
    SupBoundViolated { value: f64, bound: f64 },

    #[error("denominator {value:e} below threshold {threshold:e} at edge {edge}")]
    DegenerateDenominator {
        edge: usize,
        value: f64,
        threshold: f64,
    },

    #[error("tree oracle exceeded its budget: {0}")]
    OracleBudgetExceeded(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
