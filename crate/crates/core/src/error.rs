use thiserror::Error;

/// Errors for measure construction, quadrature, and flow integration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate semicircle has no density")]
    DegenerateSemicircle,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not normalized: total mass {mass}")]
    NotNormalized { mass: f64 },

    #[error("time {t} outside schedule horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("reverse drift undefined at the initial time (Lambda = 0)")]
    ZeroElapsedNoise,

    #[error("subordination fixed point did not converge at x = {x} (residual {residual:.3e})")]
    FixedPointDiverged { x: f64, residual: f64 },

    #[error("particle collision at index {index} (spacing {spacing:.3e}); reduce the step size or use more particles")]
    ParticleCollision { index: usize, spacing: f64 },

    #[error("log-energy singular: coincident particle positions at index {0}")]
    CoincidentParticles(usize),

    #[error("inner solver exceeded {max_iters} iterations (gradient norm {grad_norm:.3e})")]
    InnerSolverFailed { max_iters: usize, grad_norm: f64 },

    #[error("eigendecomposition failed for ensemble member {member}")]
    EigenFailed { member: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
