//! Linear-gradient stage: B = (B0 + eta x, -eta y).
//!
//! The diamagnetic potential is harmonic and confining in x with
//! omega_l = sqrt(-chi eta^2 / mu0); the two arms carry opposite spin
//! projections and feel opposite constant forces mu eta, which is what
//! splits and later recombines the superposition.

use super::StageModel;
use crate::fields::{
    self, FieldSample, StageFrequencies, TrapParams, ValidityReport,
};
use crate::particle::ParticleSpec;
use crate::schedule::{StageConfig, StageKind};

pub struct LinearStage;

impl StageModel for LinearStage {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn kind(&self) -> StageKind {
        StageKind::Linear
    }

    fn field(&self, stage: &StageConfig, x: f64, y: f64) -> FieldSample {
        fields::linear_field(stage.b0, stage.eta, x, y)
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
        (1.0, -1.0)
    }

    fn validity(
        &self,
        _stage: &StageConfig,
        _particle: &ParticleSpec,
        _x_extent: f64,
    ) -> Option<ValidityReport> {
        // The harmonic reduction of the linear map is exact.
        None
    }
}
