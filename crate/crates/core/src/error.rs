use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("not a bracket: f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign")]
    NotABracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("non-finite function value at x = {x}")]
    NonFiniteEvaluation { x: f64 },

    #[error("residual {residual:e} at x = {x} exceeds tolerance {tol:e}")]
    ResidualTooLarge { x: f64, residual: f64, tol: f64 },

    #[error("no interior extremum on ({lo}, {hi})")]
    NoInteriorExtremum { lo: f64, hi: f64 },

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("tangent pole in matching condition at k = {k}")]
    TangentPole { k: f64 },

    #[error("asymptotic estimate out of regime: R = {r} ({why})")]
    OutOfRegime { r: f64, why: &'static str },

    #[error("required precision {required} digits exceeds ceiling {ceiling} (Z = {z})")]
    PrecisionExhausted { required: u32, ceiling: u32, z: f64 },

    #[error("no doublet birth in Z interval ({z_lo}, {z_hi})")]
    NoBirthInInterval { z_lo: f64, z_hi: f64 },

    #[error("energy {energy} is not an eigenvalue (secular residual {residual:e})")]
    NotAnEigenvalue { energy: f64, residual: f64 },

    #[error("at Z = {z}: {source}")]
    AtCoupling { z: f64, source: Box<Error> },

    #[error("at N = {n}: {source}")]
    AtLevel { n: u32, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
