use thiserror::Error;

use crate::net::CoverNet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has an eigenvalue within {distance:.3e} of the negative real axis; principal logarithm undefined")]
    BranchCut { distance: f64 },

    #[error("element violates the {what} invariant (deviation {deviation:.3e}, tolerance {tol:.3e})")]
    NotInGroup {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("algebra element violates the {what} structure (deviation {deviation:.3e}, tolerance {tol:.3e})")]
    StructureViolation {
        what: &'static str,
        deviation: f64,
        tol: f64,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("generators are not linearly independent (rank {rank} of {count})")]
    DependentGenerators { rank: usize, count: usize },

    #[error("generators mix dimensions or structures")]
    MixedGenerators,

    #[error("bracket closure still growing after {depth} sweeps (dimension {dim})")]
    DepthExceeded { depth: usize, dim: usize },

    #[error("generators span a {closure_dim}-dimensional algebra, expected {expected}")]
    NotGenerating { closure_dim: usize, expected: usize },

    #[error("invalid dimensions n={n}, m={m}: need 1 <= m <= n")]
    InvalidDims { n: usize, m: usize },

    #[error("no independent conjugate found at completion step {step} (best score {best_score:.3e})")]
    StuckNoIndependentConjugate { step: usize, best_score: f64 },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("chart solve did not converge after {iterations} iterations (residual {residual:.3e}{})",
        .condition.map(|c| format!(", jacobian condition {c:.3e}")).unwrap_or_default())]
    NoConvergence {
        iterations: usize,
        residual: f64,
        condition: Option<f64>,
    },

    #[error("target lies {distance:.3e} from the identity, outside the chart radius {radius:.3e}")]
    OutsideChart { distance: f64, radius: f64 },

    #[error("net coverage not reached: max gap {max_gap:.4} exceeds radius {radius:.4}")]
    CoverageNotReached {
        max_gap: f64,
        radius: f64,
        net: Box<CoverNet>,
    },

    #[error("recurrence search exhausted its budget after {evals} evaluations{} (best t={best_time:.6}, error {best_error:.3e})",
        .letter.map(|l| format!(" on letter {l}")).unwrap_or_default())]
    BudgetExhausted {
        evals: usize,
        best_time: f64,
        best_error: f64,
        letter: Option<usize>,
    },

    #[error("one-parameter subgroup is not compact (generator is not skew-Hermitian)")]
    NonCompactDirection,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::InvalidDims { .. }
            | Error::DependentGenerators { .. }
            | Error::MixedGenerators
            | Error::StructureViolation { .. }
            | Error::NotInGroup { .. }
            | Error::NotSquare { .. }
            | Error::DimMismatch { .. }
            | Error::NonFinite
            | Error::EmptyInput
            | Error::InvalidConfig(_) => 2,
            Error::NotGenerating { .. } | Error::DepthExceeded { .. } | Error::StuckNoIndependentConjugate { .. } => 3,
            Error::NoConvergence { .. } | Error::OutsideChart { .. } | Error::BranchCut { .. } => 4,
            Error::CoverageNotReached { .. } => 5,
            Error::BudgetExhausted { .. } | Error::NonCompactDirection => 6,
            Error::IndexOutOfRange { .. } | Error::Io(_) => 1,
        }
    }
}
