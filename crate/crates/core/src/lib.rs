//! Simulation core for a five-stage spin-gradient matter-wave
//! interferometer of a levitated, fast-spinning diamagnetic particle.
//!
//! The sequence alternates linear-gradient stages (spin-dependent
//! splitting/recombination in a magnetic restoring potential) with
//! nonlinear-field stages (spin-independent inverted-oscillator
//! expansion/refolding). The crate provides:
//!
//! * exact closed-form center-of-mass propagation per stage and a
//!   directly propagated arm-difference channel ([`trajectory`]),
//! * final-stage retuning that closes the interferometer ([`trajectory::tune_closure`]),
//! * coupled translation-rotation dynamics of the spinning particle
//!   ([`dynamics`]),
//! * exact Gaussian wave-packet transport and recombination contrast
//!   ([`wavepacket`], [`contrast`]),
//! * independent numerical oracles used by the verification suite
//!   ([`oracle`]),
//! * TOML-backed run configuration with the published reference preset
//!   ([`config`]).

pub mod analysis;
pub mod config;
pub mod constants;
pub mod contrast;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod oracle;
pub mod osc;
pub mod particle;
pub mod schedule;
pub mod stage;
pub mod trajectory;
pub mod wavepacket;

pub use config::Config;
pub use error::{Error, Result};
pub use particle::{Arm, ParticleSpec};
pub use schedule::{build_schedule, Schedule, StageConfig, StageKind};
