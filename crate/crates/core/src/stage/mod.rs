//! Strategy registry for stage families.
//!
//! Each stage family (field map + derived curvatures + default spin
//! pattern) implements [`StageModel`]; the interferometer pipeline only
//! talks to the trait, so a new family plugs in by adding an entry to
//! [`REGISTRY`]. Models are stateless singletons; the per-stage numbers
//! (B0, eta, tau, spins) stay in [`StageConfig`].

mod linear;
mod nonlinear;

pub use linear::LinearStage;
pub use nonlinear::NonLinearStage;

use crate::fields::{FieldSample, StageFrequencies, TrapParams, ValidityReport};
use crate::particle::ParticleSpec;
use crate::schedule::{StageConfig, StageKind};

pub trait StageModel: Sync {
    /// Registry key; also the `kind` string accepted in configs.
    fn name(&self) -> &'static str;

    fn kind(&self) -> StageKind;

    /// Magnetic field of this family at a point.
    fn field(&self, stage: &StageConfig, x: f64, y: f64) -> FieldSample;

    /// Curvatures and drives of the harmonic reduction.
    fn frequencies(
        &self,
        stage: &StageConfig,
        particle: &ParticleSpec,
        trap: &TrapParams,
    ) -> StageFrequencies;

    /// Conventional spin projections (plus arm, minus arm).
    fn default_spins(&self) -> (f64, f64);

    /// Checks the harmonic reduction at a given excursion, if the family
    /// has a finite validity range.
    fn validity(
        &self,
        stage: &StageConfig,
        particle: &ParticleSpec,
        x_extent: f64,
    ) -> Option<ValidityReport>;
}

/// All known stage families.
pub static REGISTRY: &[&dyn StageModel] = &[&LinearStage, &NonLinearStage];

/// Looks a model up by its registry name (config `kind` string).
pub fn model_by_name(name: &str) -> Option<&'static dyn StageModel> {
    REGISTRY.iter().copied().find(|m| m.name() == name)
}

/// Model backing a built-in stage kind.
pub fn model_for(kind: StageKind) -> &'static dyn StageModel {
    match kind {
        StageKind::Linear => &LinearStage,
        StageKind::NonLinear => &NonLinearStage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup_by_name() {
        assert_eq!(model_by_name("linear").unwrap().kind(), StageKind::Linear);
        assert_eq!(
            model_by_name("nonlinear").unwrap().kind(),
            StageKind::NonLinear
        );
        assert!(model_by_name("quadrupole").is_none());
    }

    #[test]
    fn registry_names_are_unique() {
        for (i, a) in REGISTRY.iter().enumerate() {
            for b in &REGISTRY[i + 1..] {
                assert_ne!(a.name(), b.name());
            }
        }
    }

    #[test]
    fn kind_dispatch_matches_names() {
        for m in REGISTRY {
            assert_eq!(model_for(m.kind()).name(), m.name());
        }
    }

    #[test]
    fn default_spins_match_convention() {
        assert_eq!(model_for(StageKind::Linear).default_spins(), (1.0, -1.0));
        assert_eq!(model_for(StageKind::NonLinear).default_spins(), (0.0, 0.0));
    }
}
