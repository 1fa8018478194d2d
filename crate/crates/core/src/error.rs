use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series has zero constant term; no reciprocal")]
    SingularInverse,
    #[error("logarithm needs {0}")]
    LogDomain(&'static str),
    #[error("degenerate fractional linear map (r1 = {0})")]
    DegenerateMap(String),
    #[error("polynomial must have degree >= 1")]
    ConstantPolynomial,
    #[error("root finder did not converge after {iterations} iterations ({unconverged} roots unconverged)")]
    RootsNotConverged {
        iterations: usize,
        unconverged: usize,
        roots: Vec<crate::algebra::ComplexPoint>,
    },
    #[error("state space too large: {states} states exceeds the guard for {what}")]
    StateSpaceTooLarge { what: String, states: u128 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("zero exit rate at non-absorbing state {0:#b}")]
    ZeroDiagonal(u64),
    #[error("residual check failed at order {order}, state {state:#b}")]
    Residual { order: usize, state: u64 },
    #[error("site {0} outside the lattice")]
    SiteOutOfRange(i64),
    #[error("singular linear system")]
    SingularSystem,
    #[error("null space of dimension {0}, expected 1")]
    NullSpaceDimension(usize),
    #[error("rational reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("point lies on the curve |r(1-r)| = 1/4")]
    OnCurve,
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("pole location failed: {0}")]
    Pole(String),
    #[error("evaluation at a pole of the approximant")]
    AtPole,
    #[error("empty contour in window")]
    EmptyContour,
    #[error("simulation parameters: {0}")]
    Simulation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
