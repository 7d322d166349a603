use thiserror::Error;

/// Errors raised by configuration construction and the complexity kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// Two particles closer than the collision guard `1e-10 * l_rms`.
    #[error("particles {i} and {j} collide: separation {separation:e} below guard {guard:e}")]
    Collision {
        i: usize,
        j: usize,
        separation: f64,
        guard: f64,
    },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

pub type Result<T, E = ShapeError> = std::result::Result<T, E>;
