use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("triangle {triangle} references vertex {index}, mesh has {count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        count: usize,
    },
    #[error("triangle {triangle} is degenerate (area {area:e} below threshold {threshold:e})")]
    DegenerateTriangle {
        triangle: usize,
        area: f64,
        threshold: f64,
    },
    #[error("non-manifold mesh: {0}")]
    NonManifoldMesh(String),
    #[error("rank-deficient local fit at vertex {0}")]
    DegenerateNeighborhood(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("requested extent implies heights up to {required} beyond the height cap {cap}")]
    ClippedHeight { required: f64, cap: f64 },
    #[error("tilt angle {0} outside [0, pi/2)")]
    InvalidAngle(f64),
    #[error("bowl integration step too large: step-doubling discrepancy {discrepancy:e}")]
    StepSizeTooLarge { discrepancy: f64 },
    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("boundary data contains non-finite values")]
    NonFiniteBoundary,
    #[error("strip width {0} must exceed pi for a complete graph to exist")]
    WidthTooSmall(f64),
    #[error("mesh carries no truncation metadata; the Gaussian tail cannot be bounded")]
    MissingTruncationMetadata,
    #[error("entropy search needs {required} evaluations, budget is {budget}")]
    SearchBudgetExceeded { required: usize, budget: usize },
    #[error("generator height cap {cap} below the required {required}")]
    GeneratorHeightInsufficient { cap: f64, required: f64 },
    #[error("meshes intersect (triangle {0} of the first mesh)")]
    MeshesIntersect(usize),
    #[error("hull classification needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point is {distance} away from the nearest hull boundary line (tolerance {tol})")]
    NotOnBoundary { distance: f64, tol: f64 },
    #[error("plane section is empty")]
    SectionEmpty,
    #[error("no monotone approach sequence toward boundary line {0}")]
    NoMonotoneSubsequence(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from bad inputs rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::IndexOutOfRange { .. }
                | Error::DegenerateTriangle { .. }
                | Error::NonManifoldMesh(_)
                | Error::InvalidParameter(_)
                | Error::ClippedHeight { .. }
                | Error::InvalidAngle(_)
                | Error::NonFiniteBoundary
                | Error::WidthTooSmall(_)
                | Error::MissingTruncationMetadata
                | Error::TooFewPoints(_)
                | Error::NotOnBoundary { .. }
                | Error::Parse { .. }
                | Error::SchemaMismatch(_)
        )
    }

    /// Short machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DegenerateTriangle { .. } => "DegenerateTriangle",
            Error::NonManifoldMesh(_) => "NonManifoldMesh",
            Error::DegenerateNeighborhood(_) => "DegenerateNeighborhood",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ClippedHeight { .. } => "ClippedHeight",
            Error::InvalidAngle(_) => "InvalidAngle",
            Error::StepSizeTooLarge { .. } => "StepSizeTooLarge",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::NonFiniteBoundary => "NonFiniteBoundary",
            Error::WidthTooSmall(_) => "WidthTooSmall",
            Error::MissingTruncationMetadata => "MissingTruncationMetadata",
            Error::SearchBudgetExceeded { .. } => "SearchBudgetExceeded",
            Error::GeneratorHeightInsufficient { .. } => "GeneratorHeightInsufficient",
            Error::MeshesIntersect(_) => "MeshesIntersect",
            Error::TooFewPoints(_) => "TooFewPoints",
            Error::NotOnBoundary { .. } => "NotOnBoundary",
            Error::SectionEmpty => "SectionEmpty",
            Error::NoMonotoneSubsequence(_) => "NoMonotoneSubsequence",
            Error::Parse { .. } => "Parse",
            Error::SchemaMismatch(_) => "SchemaMismatch",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
