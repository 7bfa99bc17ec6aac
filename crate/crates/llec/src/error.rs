use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the clustering pipeline.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("point cloud must have at least one point and one dimension")]
    EmptyCloud,

    #[error("point cloud entries must be finite")]
    NonFiniteData,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point {point} has only {available} positive-distance candidates, need {needed}")]
    InsufficientNeighbors {
        point: usize,
        available: usize,
        needed: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular local weight system at point {point}")]
    SingularWeights { point: usize },

    #[error(
        "neighbor graph has {components} connected components; \
         perturb the cost matrix (lambda > 0) before embedding"
    )]
    Disconnected { components: usize },

    #[error(
        "eigensolver did not converge after {matvecs} operator applications \
         (worst residual {residual:.3e})"
    )]
    EigenNonConvergence { matvecs: usize, residual: f64 },

    #[error(
        "bottom eigenvector deviates from constant by {deviation:.3e}; \
         the cost matrix corank exceeds one"
    )]
    NonConstantBottomEigenvector { deviation: f64 },

    #[error("empty active set: cannot select a seed point")]
    EmptyActiveSet,

    #[error("degenerate ball: all points identical, no principal direction")]
    DegenerateBall,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported image: {0}")]
    UnsupportedImage(String),
}
