use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({x}, {y}, {z}) is outside the chart (1 + kappa/4 (x^2 + y^2) = {conformal})")]
    InvalidPoint { x: f64, y: f64, z: f64, conformal: f64 },
    #[error("frame index {0} is not one of 1, 2, 3")]
    InvalidFrameIndex(usize),
    #[error("finite-difference step {step} is too large: distance to the chart boundary is {margin}")]
    StepTooLarge { step: f64, margin: f64 },
    #[error("tangent plane is degenerate at (u, v) = ({u}, {v})")]
    DegenerateTangentPlane { u: f64, v: f64 },
    #[error("angle theta = {theta} is too close to 0 or pi/2 for the {{T, JT}} basis")]
    BasisDegenerate { theta: f64 },
    #[error("stencil point (u, v) = ({u}, {v}) lies outside the parameter domain")]
    StencilOutOfDomain { u: f64, v: f64 },
    #[error("(u, v) = ({u}, {v}) is not a node of the sampled grid")]
    OffGrid { u: f64, v: f64 },
    #[error("invalid surface specification: {0}")]
    InvalidSpec(String),
    #[error("theta = {theta} with tau = {tau}: the horizontal distribution is not integrable")]
    NonIntegrable { theta: f64, tau: f64 },
    #[error("closed form is singular near (u, v) = ({u}, {v})")]
    Singularity { u: f64, v: f64 },
    #[error("r^2 = kappa sin^2(theta) + 4 tau^2 cos^2(theta) = {r_squared} is not positive")]
    UnsolvedBranch { r_squared: f64 },
    #[error("integration constant D vanishes at v = {v}")]
    ZeroD { v: f64 },
    #[error("B vanishes at v = {v}; the arctan branch is undefined")]
    BranchInconsistency { v: f64 },
    #[error("base curve is singular at s = {s}")]
    SingularCurve { s: f64 },
    #[error("invalid integration step {0}")]
    InvalidStep(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
