use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particle outside the dipole regime: radius/wavelength = {ratio:.3} (must be < 0.2)")]
    DipoleRegime { ratio: f64 },

    #[error("relative permittivity {0} is not physical (must be > 1)")]
    NonPhysicalPermittivity(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("characteristic length undefined: Gaussian fraction is zero (ratio I_L/I_G diverges)")]
    UndefinedLength,

    #[error("oscillation frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("integration failed at t = {time:e} s with step {step:e} s (non-finite state)")]
    IntegrationFailure { time: f64, step: f64 },

    #[error("step {step:e} s exceeds the stability bound {bound:e} s")]
    StepTooLarge { step: f64, bound: f64 },

    #[error("state became unphysical at t = {time:e} s (smallest symplectic eigenvalue {nu:.12})")]
    Unphysical { time: f64, nu: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("trap schedule has no segments")]
    EmptySchedule,
}
