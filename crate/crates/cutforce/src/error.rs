//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tool or process geometry: {0}")]
    InvalidGeometry(String),

    #[error("feed {feed} mm exceeds the largest feed {max} mm for which subsequent cuts overlap")]
    FeedTooLarge { feed: f64, max: f64 },

    #[error("degenerate uncut chip region: {0}")]
    DegenerateRegion(String),

    #[error("triangulation failed: {0}")]
    MeshFailure(String),

    #[error("singular element Jacobian (non-positive triangle area)")]
    SingularJacobian,

    #[error("singular global system: {0}")]
    SingularSystem(String),

    #[error("vanishing displacement gradient in element {element}")]
    ZeroGradient { element: usize },

    #[error("gimbal singularity: |cos(alpha_n)| below threshold")]
    GimbalSingularity,

    #[error("streamline trace stalled after {steps} steps without reaching a boundary")]
    TraceStalled { steps: usize },

    #[error("streamline trace for element {element} failed: {source}")]
    ElementTrace {
        element: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid uncut chip thickness {0} mm (must be > 0)")]
    InvalidChipThickness(f64),

    #[error("deflection iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("measured force component {component} is zero; relative error undefined")]
    DivisionByZero { component: usize },

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
