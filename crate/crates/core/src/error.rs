use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root index {0} out of range, expected 0, 1 or 2")]
    IndexOutOfRange(usize),
    #[error("argument {0} violates the overflow guard |Re(zeta_j z)| <= 700")]
    Overflow(Complex64),
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("Neumann series did not converge after {terms} terms (last term {last:e})")]
    Divergence { terms: usize, last: f64 },
    #[error("ODE integration failed: {0}")]
    Ode(String),
    #[error("evaluation points do not match")]
    MismatchedPoints,
    #[error("t00 vanishes at lambda = {0}: bound-state candidate")]
    BoundStateCandidate(Complex64),
    #[error("point lies on a jump ray")]
    OnRay,
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("tau = {0} lies outside the sampled grid")]
    Extrapolation(f64),
    #[error("singular system (condition estimate {0:e})")]
    Singular(f64),
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
