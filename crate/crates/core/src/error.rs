use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension d={0} outside supported range (need d >= 5)")]
    Dimension(u32),

    #[error("time t={t} is not before blowup time T={blowup}")]
    PastBlowup { t: f64, blowup: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("derivative order {0} not supported")]
    DerivativeOrder(u32),

    #[error("hankel quadrature did not converge: tail {tail:.3e} exceeds {tol:.3e}")]
    QuadratureTail { tail: f64, tol: f64 },

    #[error("invalid norm specification: {0}")]
    NormSpec(String),

    #[error("time step {dt:.3e} violates CFL limit {limit:.3e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("point {x} outside interpolation range [0, {max}]")]
    OutOfRange { x: f64, max: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("growth probe inconclusive at T={0}; increase the probe horizon")]
    ProbeIndeterminate(f64),

    #[error("spectral parameter {lambda} within {dist:.3e} of a resonant Frobenius index")]
    ResonantIndex { lambda: String, dist: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("phase tracking failed: {0}")]
    PhaseTracking(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
