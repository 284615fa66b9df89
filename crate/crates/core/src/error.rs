//! Unified error type for the simulator.

use thiserror::Error;

/// Everything that can go wrong while building schedules, propagating
/// states, evolving wave packets, or tuning the closing stage.
#[derive(Debug, Error)]
pub enum Error {
    /// A schedule must have exactly five stages.
    #[error("schedule must contain exactly 5 stages, got {0}")]
    WrongStageCount(usize),

    /// Stages must alternate linear, nonlinear, linear, nonlinear, linear.
    #[error("stage {index} must be {expected:?}, got {found:?}")]
    KindOrderViolation {
        index: usize,
        expected: crate::schedule::StageKind,
        found: crate::schedule::StageKind,
    },

    /// Every stage needs a strictly positive duration.
    #[error("stage {index} duration must be > 0, got {tau}")]
    NonPositiveDuration { index: usize, tau: f64 },

    /// The diamagnetic susceptibility must be negative for the magnetic
    /// potentials to have the assumed curvature signs.
    #[error("mass susceptibility must be negative, got {0}")]
    NonNegativeSusceptibility(f64),

    /// Asked a stage-kind-specific quantity of the wrong kind of stage.
    #[error("operation requires a {expected:?} stage, got {found:?}")]
    WrongStageKind {
        expected: crate::schedule::StageKind,
        found: crate::schedule::StageKind,
    },

    /// A queried time lies outside the schedule's [0, t5] span.
    #[error("time {t} outside schedule span [0, {t_end}]")]
    TimeOutOfRange { t: f64, t_end: f64 },

    /// The polar angle approached the coordinate singularity of the
    /// Euler-angle parameterization.
    #[error("polar angle too close to singularity: sin(beta) = {sin_beta:e} at t = {t}")]
    BetaSingularity { t: f64, sin_beta: f64 },

    /// The adaptive integrator could not meet its tolerances even at the
    /// smallest representable step.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// A derivative evaluation produced NaN or infinity.
    #[error("non-finite derivative at t = {t}")]
    NonFiniteDerivative { t: f64 },

    /// The closure tuner ran out of iterations (or the residual map became
    /// non-finite). Carries the best residuals seen.
    #[error(
        "closure tuning failed after {iterations} iterations \
         (best |dx| = {best_dx:e} m, best |dv| = {best_dv:e} m/s)"
    )]
    NoConvergence {
        iterations: usize,
        best_dx: f64,
        best_dv: f64,
    },

    /// Interference of two packets requires equal widths; the analytic
    /// overlap formula is only valid in that regime.
    #[error("packet widths differ beyond tolerance: {sigma_left:e} vs {sigma_right:e}")]
    WidthMismatch { sigma_left: f64, sigma_right: f64 },

    /// A quadrature or evolution was requested too close to a focusing
    /// caustic of the stage propagator, where the integral representation
    /// degenerates.
    #[error("propagation too close to a caustic: |S(tau)| = {s_abs:e}")]
    CausticProximity { s_abs: f64 },

    /// The closed-form propagator was evaluated exactly at a caustic.
    #[error("propagator caustic at tau = {tau}")]
    PropagatorCaustic { tau: f64 },

    /// Configuration file could not be parsed or failed validation.
    #[error("config error: {0}")]
    ConfigParse(String),

    /// Underlying I/O failure (config loading, output writing).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
