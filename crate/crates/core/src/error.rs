use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {coords:?} lies outside the chart domain of {manifold}")]
    OutsideChart { manifold: String, coords: Vec<f64> },

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("geodesic left the chart domain at t = {t}")]
    ChartExit { t: f64 },

    #[error("ODE step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("points are not contained in a common convex ball (distance {distance})")]
    NotInConvexBall { distance: f64 },

    #[error("shooting solver did not converge (residual {residual})")]
    ShootingFailed { residual: f64 },

    #[error("point at distance {distance} violates the radius precondition {radius}")]
    RadiusPrecondition { distance: f64, radius: f64 },

    #[error("expression parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("point is exterior to the set (psi = {psi})")]
    ExteriorPoint { psi: f64 },

    #[error("gradient of psi vanishes at {coords:?}")]
    VanishingGradient { coords: Vec<f64> },

    #[error("sampler produced no feasible points")]
    NoFeasibleSamples,

    #[error("operation requires a solid set")]
    ThinSet,

    #[error("operation is not supported for {0}")]
    Unsupported(String),

    #[error("no convergence within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    #[error("all multi-start initializations were infeasible or failed")]
    AllStartsFailed,

    #[error("projection is ambiguous at {coords:?} ({count} minimizers)")]
    AmbiguousProjection { coords: Vec<f64>, count: usize },

    #[error("Richardson extrapolation did not settle (last change {change})")]
    ExtrapolationDiverged { change: f64 },

    #[error("quadratic growth condition violated by {violation}")]
    QuadraticGrowthViolated { violation: f64 },

    #[error("variation is infeasible at node {index} (psi = {psi})")]
    InfeasibleNode { index: usize, psi: f64 },

    #[error("node {0} is not an interior non-breakpoint node")]
    InvalidNode(usize),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("y coincides with x")]
    CoincidentPoints,
}
