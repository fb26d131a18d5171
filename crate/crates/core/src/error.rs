use thiserror::Error;

/// Errors raised by the library. Numeric payloads are reported as `f64`
/// regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("component {component} is not finite")]
    NonFinite { component: usize },

    #[error("component {component} = {value} lies outside [-1, 1] beyond tolerance")]
    OutOfBox { component: usize, value: f64 },

    #[error("vector is not s-ordered (x1 >= x2 >= x3 >= |x4| required): {vector:?}")]
    NotSOrdered { vector: [f64; 4] },

    #[error("point is not on the arcsine boundary: f(x) - pi = {deviation:e}")]
    NotOnBoundary { deviation: f64 },

    #[error("point is not on the x1 = 1 face: x1 = {x1}")]
    NotOnFace { x1: f64 },

    #[error("point lies outside Q (margin_Q = {margin_q:e}, margin_C = {margin_c:e})")]
    OutsideQ { margin_q: f64, margin_c: f64 },

    #[error("bisection failed: {reason}")]
    Bisection { reason: &'static str },

    #[error("invalid dimension {dim}: must lie in [{min}, {max}]")]
    Dimension { dim: usize, min: usize, max: usize },

    #[error("matrix shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("realization invariant violated: {check} (deviation {deviation:e})")]
    Invariant { check: String, deviation: f64 },

    #[error("invalid decomposition: {0}")]
    Decomposition(String),

    #[error("invalid parameter: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
