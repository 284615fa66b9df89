//! Stage schedule: the five-stage sequence, its timing, and the per-arm
//! spin assignments.
//!
//! Stages alternate linear-gradient and nonlinear-gradient field
//! configurations: L, N, L, N, L. Each stage occupies the half-open
//! interval [t_{k-1}, t_k); the final stage additionally owns t5 itself.
//! Switching between stages is instantaneous; positions and velocities
//! carry over unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::particle::Arm;

/// Field configuration of a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    /// Uniform bias plus linear gradient: B = (B0 + eta x, -eta y).
    Linear,
    /// Bias plus quadratic (second-order-gradient) field:
    /// B = (B0 - eta (x^2 - y^2), 2 eta x y).
    NonLinear,
}

/// One stage of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageConfig {
    pub kind: StageKind,
    /// Bias field [T].
    pub b0: f64,
    /// Gradient strength: [T/m] for linear stages, [T/m^2] for nonlinear.
    pub eta: f64,
    /// Duration [s].
    pub tau: f64,
    /// Spin projection on the `Plus` arm during this stage (-1, 0, +1).
    pub spin_plus: f64,
    /// Spin projection on the `Minus` arm during this stage.
    pub spin_minus: f64,
}

impl StageConfig {
    /// Linear stage with the standard (+1, -1) arm spins.
    pub fn linear(b0: f64, eta: f64, tau: f64) -> Self {
        StageConfig {
            kind: StageKind::Linear,
            b0,
            eta,
            tau,
            spin_plus: 1.0,
            spin_minus: -1.0,
        }
    }

    /// Nonlinear stage; both arms are shelved in the spin-0 state.
    pub fn nonlinear(b0: f64, eta: f64, tau: f64) -> Self {
        StageConfig {
            kind: StageKind::NonLinear,
            b0,
            eta,
            tau,
            spin_plus: 0.0,
            spin_minus: 0.0,
        }
    }

    /// Spin carried by `arm` during this stage.
    pub fn spin(&self, arm: Arm) -> f64 {
        match arm {
            Arm::Plus => self.spin_plus,
            Arm::Minus => self.spin_minus,
        }
    }
}

/// Validated five-stage schedule with precomputed transition times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    stages: [StageConfig; 5],
    /// Cumulative end times t1..t5 [s].
    transitions: [f64; 5],
}

/// The expected alternation pattern.
const KIND_PATTERN: [StageKind; 5] = [
    StageKind::Linear,
    StageKind::NonLinear,
    StageKind::Linear,
    StageKind::NonLinear,
    StageKind::Linear,
];

/// Validates the stage list and computes transition times.
///
/// Errors: wrong stage count, broken L/N/L/N/L alternation, or a
/// non-positive duration. Spin assignments are deliberately not policed
/// here (a drive-free schedule with all spins zero is legitimate input).
pub fn build_schedule(stages: Vec<StageConfig>) -> Result<Schedule> {
    let n = stages.len();
    let stages: [StageConfig; 5] = stages
        .try_into()
        .map_err(|_| Error::WrongStageCount(n))?;
    for (index, (stage, expected)) in stages.iter().zip(KIND_PATTERN).enumerate() {
        if stage.kind != expected {
            return Err(Error::KindOrderViolation {
                index,
                expected,
                found: stage.kind,
            });
        }
        if !stage.tau.is_finite() || stage.tau <= 0.0 {
            return Err(Error::NonPositiveDuration {
                index,
                tau: stage.tau,
            });
        }
    }
    let mut transitions = [0.0; 5];
    let mut acc = 0.0;
    for (t, stage) in transitions.iter_mut().zip(&stages) {
        acc += stage.tau;
        *t = acc;
    }
    Ok(Schedule { stages, transitions })
}

impl Schedule {
    pub fn stages(&self) -> &[StageConfig; 5] {
        &self.stages
    }

    pub fn stage(&self, index: usize) -> &StageConfig {
        &self.stages[index]
    }

    /// Cumulative stage end times t1..t5 [s].
    pub fn transitions(&self) -> [f64; 5] {
        self.transitions
    }

    /// Start time of stage `index`.
    pub fn stage_start(&self, index: usize) -> f64 {
        if index == 0 {
            0.0
        } else {
            self.transitions[index - 1]
        }
    }

    /// Total schedule span t5 [s].
    pub fn total_time(&self) -> f64 {
        self.transitions[4]
    }

    /// Index of the stage owning time `t`: stage k covers [t_{k-1}, t_k),
    /// and the last stage also owns t5 exactly.
    pub fn stage_index_at(&self, t: f64) -> Result<usize> {
        let t_end = self.total_time();
        if !(0.0..=t_end).contains(&t) {
            return Err(Error::TimeOutOfRange { t, t_end });
        }
        for (k, end) in self.transitions.iter().enumerate() {
            if t < *end {
                return Ok(k);
            }
        }
        Ok(4) // t == t5 belongs to the closing stage
    }

    /// Spin of `arm` at time `t`.
    pub fn spin_at(&self, t: f64, arm: Arm) -> Result<f64> {
        Ok(self.stage(self.stage_index_at(t)?).spin(arm))
    }

    /// Replaces the closing stage's gradient and duration (used by the
    /// closure tuner), revalidating timing.
    pub fn with_final_stage(&self, eta: f64, tau: f64) -> Result<Schedule> {
        let mut stages = self.stages.to_vec();
        stages[4].eta = eta;
        stages[4].tau = tau;
        build_schedule(stages)
    }
}
