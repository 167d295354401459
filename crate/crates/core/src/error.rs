use std::path::PathBuf;

/// Everything that can go wrong inside the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("desk-scale exceeded: Hilbert dimension {required} is above the cap {cap}")]
    DeskScaleExceeded { required: u128, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("superposition sums to the zero vector")]
    ZeroVector,

    #[error("requested {requested} secondary states but only {possible} distinct ones exist")]
    NotEnoughStates { requested: usize, possible: usize },

    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("operators do not commute: max |[H, H_D]| = {0:e}")]
    NonCommuting(f64),

    #[error("degenerate 2D embedding: state is an eigenstate of H_D (variance {0:e})")]
    DegenerateEmbedding(f64),

    #[error("operator is not diagonal in the computational basis")]
    NotDiagonal,

    #[error("eigensolver failed: {reason} (residual {residual:e})")]
    Eigensolver { reason: String, residual: f64 },

    #[error("missing eigendecomposition; call `diagonalize` first")]
    MissingEigensystem,

    #[error("invalid cost query: {0}")]
    InvalidCostQuery(String),

    #[error("cost ratio undefined: phase-retrieval circuit uses zero CNOTs")]
    ZeroCnots,

    #[error("config field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
