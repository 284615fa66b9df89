//! Nonlinear (quadratic) stage: B = (B0 - eta (x^2 - y^2), 2 eta x y).
//!
//! Near the axis the diamagnetic potential is an inverted harmonic hill
//! in x with omega_nl = sqrt(-2 chi B0 eta / mu0); both arms carry spin
//! projection 0, so the stage expands and refolds the separation without
//! any spin force. The harmonic reduction only holds while
//! (kappa x / omega_nl)^2 stays small.

use super::StageModel;
use crate::fields::{
    self, FieldSample, StageFrequencies, TrapParams, ValidityReport,
};
use crate::particle::ParticleSpec;
use crate::schedule::{StageConfig, StageKind};

pub struct NonLinearStage;

impl StageModel for NonLinearStage {
    fn name(&self) -> &'static str {
        "nonlinear"
    }

    fn kind(&self) -> StageKind {
        StageKind::NonLinear
    }

    fn field(&self, stage: &StageConfig, x: f64, y: f64) -> FieldSample {
        fields::nonlinear_field(stage.b0, stage.eta, x, y)
    }

    fn frequencies(
        &self,
        stage: &StageConfig,
        particle: &ParticleSpec,
        trap: &TrapParams,
    ) -> StageFrequencies {
        fields::stage_frequencies(stage, particle, trap)
    }

    fn default_spins(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn validity(
        &self,
        stage: &StageConfig,
        particle: &ParticleSpec,
        x_extent: f64,
    ) -> Option<ValidityReport> {
        let freq = fields::stage_frequencies(stage, particle, &TrapParams::default());
        Some(fields::check_nonlinear_validity(&freq, x_extent))
    }
}
