use thiserror::Error;

/// Errors raised by map evaluation, orbit searches, chart construction and fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain {domain}")]
    Domain { x: f64, domain: String },

    #[error("evaluation at a pole (x = {x})")]
    Pole { x: f64 },

    #[error("derivative order {0} is not supported (expected 1..=3)")]
    DerivativeOrder(usize),

    #[error("derivative requested at the kink; ask a branch directly")]
    KinkDerivative,

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("division by the zero rational function")]
    DivisionByZero,

    #[error("singular Möbius transformation (determinant is zero)")]
    SingularMobius,

    #[error("Möbius transformation does not map the target domain onto {0}")]
    MobiusDomain(String),

    #[error("piecewise branches disagree at the kink: left(0) = {left}, right(0) = {right}")]
    Discontinuous { left: f64, right: f64 },

    #[error("points do not form an orbit: |f(x[{index}]) - x[{next}]| = {gap:e}")]
    NotAnOrbit { index: usize, next: usize, gap: f64 },

    #[error("map is not a full unimodal map: {0}")]
    NotUnimodal(String),

    #[error("branch inversion failed: target {target} not covered by [{lo}, {hi}]")]
    Inversion { target: f64, lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },

    #[error("orbit left the domain at iterate {index} (x = {x})")]
    Escape { index: usize, x: f64 },

    #[error("fixed point at {x} is nonhyperbolic (multiplier {multiplier})")]
    Nonhyperbolic { x: f64, multiplier: f64 },

    #[error("fixed point at {x} is superattracting (multiplier {multiplier})")]
    Superattracting { x: f64, multiplier: f64 },

    #[error("{x} is not a fixed point (|f(x) - x| = {gap:e})")]
    NotFixed { x: f64, gap: f64 },

    #[error("basin {basin} contains another fixed point at {x}")]
    ExtraFixedPoint { basin: String, x: f64 },

    #[error("point {x} is outside the basin {basin}")]
    OutsideBasin { x: f64, basin: String },

    #[error("multipliers differ: {left} vs {right}; no differentiable conjugacy pairs these points")]
    MultiplierMismatch { left: f64, right: f64 },

    #[error("assumption failed: {0}")]
    Assumption(String),

    #[error("fixed point missing: {0}")]
    MissingFixedPoint(String),

    #[error("expected {expected} fixed points near 0, found {found}")]
    FixedPointCount { expected: usize, found: usize },

    #[error("zero one-sided derivative at the kink")]
    ZeroSlope,

    #[error("grid too coarse near {location}: {available} points on one side (need 8)")]
    CoarseGrid { location: f64, available: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
