use thiserror::Error;

/// Errors raised by group operations, integrators and the constructions built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("closure error: commutator leaves the span of the algebra basis (residual {residual:.3e})")]
    Closure { residual: f64 },

    #[error("branch error: {0}")]
    Branch(String),

    #[error("step too large on [{t0}, {t1}]: {reason}")]
    StepTooLarge { t0: f64, t1: f64, reason: String },

    #[error("integrity error: constraint drift {drift:.3e} at t = {t}")]
    Integrity { drift: f64, t: f64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("loop error: closure gap {gap:.3e}")]
    OpenLoop { gap: f64 },

    #[error("form is not flat: residual {residual:.3e} at {point:?}")]
    NotFlat { residual: f64, point: Vec<f64> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid homomorphism: bracket residual {residual:.3e}")]
    InvalidHom { residual: f64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
