use thiserror::Error;

/// Errors shared by the geometry, potential, dynamics and analysis layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("u = {u} lies outside the surface domain [{lo}, {hi}]")]
    Domain { u: f64, lo: f64, hi: f64 },

    #[error("profile radius vanishes at u = {u}")]
    SingularPoint { u: f64 },

    #[error("profile slope exceeds unit speed near u = {u}; no isometric embedding there")]
    NonEmbeddable { u: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("evaluation error at u = {u}: {message}")]
    Eval { u: f64, message: String },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("theta vanishes at u = {u}; the oscillator potential is singular there")]
    ThetaZero { u: f64 },

    #[error("energy drift {drift:.3e} at t = {t} exceeds the per-step budget; reduce dt")]
    StepTooLarge { t: f64, drift: f64 },

    #[error("value {value} is not attained on the monotone theta branch")]
    Range { value: f64 },

    #[error("surface does not have constant h, so theta has no pinned closed form")]
    NonConstantH,

    #[error("no turning point on the {side} side: orbit unbounded or reaches the boundary")]
    Unbound { side: &'static str },

    #[error("quadrature error estimate {estimate:.3e} exceeds tolerance {tol:.3e}")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("degenerate circular orbit: {0}")]
    DegenerateCircular(String),

    #[error("no real oscillator orbit: eta^2 = {eta_squared:.6e} < 0")]
    ComplexEta { eta_squared: f64 },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
