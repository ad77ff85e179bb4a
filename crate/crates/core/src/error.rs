use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("empty configuration")]
    EmptyConfig,

    #[error("basis mismatch: angle has {found} coefficients, basis declares {expected}")]
    BasisMismatch { expected: usize, found: usize },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid angle: {0}")]
    InvalidAngle(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("invalid decimal literal {0:?}")]
    InvalidDecimal(String),

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e} at k = {k}; conjugate closure is broken")]
    ImaginaryResidue { k: i64, residue: f64, tolerance: f64 },

    #[error("configuration is not conjugate-closed")]
    NotConjugateClosed,

    #[error("angle 0 present at node {0} (z = 1)")]
    UnitRoot(usize),

    #[error("repeated angles at nodes {0} and {1}")]
    RepeatedAngle(usize, usize),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("non-degeneracy certificate does not match this configuration")]
    TokenMismatch,

    #[error("float angles do not support exact decomposition")]
    FloatAngle,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precision of {available} bits is insufficient; height limit {height} over {count} values needs {required}")]
    InsufficientPrecision {
        available: u32,
        required: u32,
        height: u64,
        count: usize,
    },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate:e}")]
    QuadratureNonConvergence { estimate: f64, error_estimate: f64 },

    #[error("budget exhausted after {effort} candidates; best deviation {best_delta:e} at k = {best_k}")]
    BudgetExhausted { effort: u64, best_k: i64, best_delta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lattice basis is linearly dependent")]
    DependentLattice,

    #[error("index {0} exceeds the supported range of exact phase reduction")]
    IndexOutOfRange(i64),
}
