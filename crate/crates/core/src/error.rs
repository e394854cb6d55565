use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// The spatial block `Q(t)` of an observer transformation is not invertible.
    #[error("singular frame at t = {t}: |det Q| = {det:e} is at or below 1e-12")]
    SingularFrame { t: f64, det: f64 },

    /// A rate defined only for spacelike vectors was handed a vector with a time component.
    #[error("vector is not spacelike: time component {c0}")]
    NotSpacelike { c0: f64 },

    #[error("invalid motion: {0}")]
    InvalidMotion(&'static str),

    /// The RK4 step-doubling error estimate exceeded the admissible bound.
    #[error("integration step {step} too large: local truncation estimate {estimate:e} exceeds 1e-3")]
    StepTooLarge { step: f64, estimate: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
