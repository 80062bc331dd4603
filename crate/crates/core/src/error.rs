use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which exact-potential identity a model failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// psi(a,b) - psi(a',b) = h(a,b) - h(a',b)
    FirstArgument,
    /// psi(a,b) - psi(a,b') = h_rev(b,a) - h_rev(b',a)
    SecondArgument,
    /// grad_1 psi = grad_1 h
    FirstGradient,
    /// grad_2 psi = grad_1 h_rev
    SecondGradient,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::FirstArgument => "first-argument difference identity",
            Identity::SecondArgument => "second-argument difference identity",
            Identity::FirstGradient => "first-argument gradient identity",
            Identity::SecondGradient => "second-argument gradient identity",
        };
        f.write_str(s)
    }
}

/// Witness for a violated potential identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub identity: Identity,
    pub a: Vec<f64>,
    pub a_alt: Vec<f64>,
    pub b: Vec<f64>,
    pub b_alt: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} has degree {degree}, exceeding the bound {bound}")]
    DegreeBoundExceeded {
        vertex: usize,
        degree: usize,
        bound: usize,
    },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("size limit exceeded: {size} vertices > limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(usize, usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not connected")]
    NotConnected,
    #[error("operation not supported for this ensemble: {0}")]
    UnsupportedEnsemble(String),
    #[error("invalid transport value {value} at ({from}, {to})")]
    InvalidTransport { from: usize, to: usize, value: f64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("profile is not constant on class {class}")]
    ProfileNotClassConstant { class: usize },
    #[error("potential property violated ({}): lhs {} vs rhs {}", .0.identity, .0.lhs, .0.rhs)]
    PropertyViolated(Box<Violation>),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("no descent: backtracking reached step {step:e} at iteration {iter}")]
    NoDescent { iter: usize, step: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFiniteValue(String),
    #[error("best-response bracket failed at vertex {vertex}")]
    BracketFailure { vertex: usize },
    #[error("unbalanced source: sum of eta = {sum:e}")]
    Unbalanced { sum: f64 },
    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("insufficient radius: need at least {needed}, got {got}")]
    InsufficientRadius { needed: usize, got: usize },
    #[error("Green series tail does not converge (ratio {ratio})")]
    DivergentTail { ratio: f64 },
    #[error("configuration-model pairing failed after {attempts} attempts")]
    PairingFailed { attempts: usize },
    #[error("n * D must be even (n = {n}, D = {degree})")]
    InvalidParity { n: usize, degree: usize },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
