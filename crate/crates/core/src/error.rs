use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unsupported function `{name}` at byte {pos}")]
    UnsupportedFunction { name: String, pos: usize },

    #[error("non-finite {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },

    #[error("invalid field specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("axis is not a unit vector (|axis| = {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("state is not normalized (norm deviation {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("n3 = {n3:e} is within the pole guard of the inverse method")]
    PoleSingularity { n3: f64 },

    #[error("velocity is not tangent to the sphere (n . n_dot = {dot:e})")]
    NonTangent { dot: f64 },

    #[error("trajectory reaches the south-pole guard at t = {t} (1 + n3 = {margin:e})")]
    SouthPoleSingularity { t: f64, margin: f64 },

    #[error("trajectory is not closed (|n(end) - n(0)| = {gap:e})")]
    OpenCurve { gap: f64 },

    #[error(
        "no evolution loop at tau = {tau}: alpha residual {residual_alpha:e}, beta residual {residual_beta:e}"
    )]
    NotALoop {
        tau: f64,
        residual_alpha: f64,
        residual_beta: f64,
    },

    #[error("quadrature hit the subdivision limit (error estimate {estimate:e}, value {value})")]
    SubdivisionLimit { value: f64, estimate: f64 },
}
