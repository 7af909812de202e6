use thiserror::Error;

use crate::geometry::Point;

/// Errors raised by geometry, projections, the iteration engine, probes and constructions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("zero vector where a nonzero vector is required: {0}")]
    ZeroVector(&'static str),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("projection is not supported for set kind `{0}`")]
    UnsupportedProjection(&'static str),

    #[error("Dykstra did not converge after {cycles} cycles (last displacement {residual:e})")]
    DykstraNotConverged {
        cycles: usize,
        residual: f64,
        last: Point,
    },

    #[error("set is unbounded in the requested direction")]
    Unbounded,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("sampling failed: {0}")]
    SamplingFailed(String),

    #[error("schedule exhausted at iteration {n}")]
    ScheduleExhausted { n: usize },

    #[error("projection failed at iteration {n}: {source}")]
    Projection {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction condition `{condition}` failed: {detail}")]
    Construction { condition: String, detail: String },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
