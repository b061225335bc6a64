use crate::bandspec::Violation;

/// Errors produced by band construction, operator assembly and the
/// spectral routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid band configuration: {}", format_violations(.0))]
    InvalidBands(Vec<Violation>),

    #[error("sampling grid axis {axis} has {size} samples, at least 2 are required")]
    GridTooSmall { axis: usize, size: usize },

    #[error("band {band} violates the Nyquist rate on axis {axis}: Ts*(|F|+B) = {scaled} > 1/2")]
    Nyquist { band: usize, axis: usize, scaled: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(
        "operator of size {size} exceeds the materialization cap {cap}; use apply_cubic instead"
    )]
    CapExceeded { size: usize, cap: usize },

    #[error("eigendecomposition failed for {context}: {reason}")]
    Eigensolver { context: String, reason: String },

    #[error("singular value decomposition failed: {0}")]
    Svd(String),

    #[error(
        "trace/Frobenius gap {gap} exceeds the bound {bound} (trace {trace}, squared Frobenius norm {frob_sq})"
    )]
    GapBound {
        trace: f64,
        frob_sq: f64,
        gap: f64,
        bound: f64,
    },

    #[error("empty dictionary")]
    EmptyDictionary,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
