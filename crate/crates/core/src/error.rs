use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("point ({x}, {y}) is a boundary corner; curvature is undefined there", x = .0[0], y = .0[1])]
    Corner(Point),

    #[error("point ({x}, {y}) violates the domain guard: {reason}", x = .point[0], y = .point[1])]
    GuardViolation { point: Point, reason: String },

    #[error("coefficient field is invalid at ({x}, {y}): {reason}", x = .point[0], y = .point[1])]
    Coefficient { point: Point, reason: String },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("trial space is degenerate: {0}")]
    Degenerate(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
