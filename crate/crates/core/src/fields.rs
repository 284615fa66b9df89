//! Magnetic field maps of the two stage families and the derived
//! per-stage frequencies, drives, and validity diagnostics.
//!
//! Both field maps are divergence- and curl-free in the (x, y) plane:
//!
//! * linear:    B = (B0 + eta x, -eta y)
//! * nonlinear: B = (B0 - eta (x^2 - y^2), 2 eta x y)
//!
//! A diamagnetic particle (mass susceptibility chi < 0) in |B|^2/2 of the
//! linear map sees a restoring x-curvature -omega_l^2 with
//! omega_l = sqrt(-chi eta^2 / mu0); the nonlinear map gives an inverted
//! curvature +omega_nl^2 with omega_nl = sqrt(-2 chi B0 eta / mu0).

use serde::{Deserialize, Serialize};

use crate::constants::MU_0;
use crate::particle::ParticleSpec;
use crate::schedule::{StageConfig, StageKind};

/// In-plane magnetic field at a point [T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub bx: f64,
    pub by: f64,
}

impl FieldSample {
    pub fn magnitude(&self) -> f64 {
        self.bx.hypot(self.by)
    }
}

/// Sign convention for how the transverse trap combines with the
/// magnetic anti-trapping curvature in linear stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrapSign {
    /// y'' = (omega_y^2 - omega_l^2) y in linear stages; the stated form.
    #[default]
    AsWritten,
    /// y'' = -(omega_y^2 + omega_l^2) y in linear stages; both curvatures
    /// restoring.
    Conventional,
}

/// External transverse trap acting on the y channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapParams {
    pub enabled: bool,
    /// Trap angular frequency [rad/s].
    pub omega_y: f64,
    pub sign: TrapSign,
}

impl Default for TrapParams {
    fn default() -> Self {
        TrapParams {
            enabled: true,
            omega_y: 521.0,
            sign: TrapSign::AsWritten,
        }
    }
}

impl TrapParams {
    /// Effective trap frequency entering the equations of motion.
    pub fn omega_y_effective(&self) -> f64 {
        if self.enabled {
            self.omega_y
        } else {
            0.0
        }
    }
}

/// Per-stage derived quantities: curvatures of x'' = k_x x + f and
/// y'' = k_y y, the drive decomposition, and the nonlinearity scale.
#[derive(Debug, Clone, Copy)]
pub struct StageFrequencies {
    pub kind: StageKind,
    /// Characteristic angular frequency [rad/s]: omega_l (linear) or
    /// omega_nl (nonlinear).
    pub omega: f64,
    /// Signed x-curvature [1/s^2]: -omega_l^2 or +omega_nl^2.
    pub k_x: f64,
    /// Signed y-curvature [1/s^2] including the trap.
    pub k_y: f64,
    /// Nonlinearity scale kappa [rad/(s m)]; 0 for linear stages.
    pub kappa: f64,
    /// Magnitude of the spin-dependent force per unit spin, mu eta [N];
    /// 0 for nonlinear. Enters the x force with an overall minus sign.
    pub spin_force: f64,
    /// Magnitude of the spin-independent bias force, -chi m B0 eta / mu0
    /// [N]; 0 for nonlinear. Enters the x force with an overall minus
    /// sign (the diamagnet is expelled toward weaker field, i.e. -x).
    pub bias_force: f64,
    /// Particle mass [kg], carried for acceleration conversions.
    pub mass: f64,
}

impl StageFrequencies {
    /// Signed constant force on the x channel for a given spin
    /// projection [N]: -(spin mu eta - chi m B0 eta / mu0). Negative for
    /// both arms with the reference signs; the spin +1 arm is pushed
    /// harder.
    pub fn drive_force(&self, spin: f64) -> f64 {
        -(spin * self.spin_force + self.bias_force)
    }

    /// Constant acceleration f in x'' = k_x x + f [m/s^2].
    pub fn drive_accel(&self, spin: f64) -> f64 {
        self.drive_force(spin) / self.mass
    }
}

/// Derives the curvatures and drives of one stage.
pub fn stage_frequencies(
    stage: &StageConfig,
    particle: &ParticleSpec,
    trap: &TrapParams,
) -> StageFrequencies {
    let chi = particle.susceptibility;
    let m = particle.mass;
    let wy = trap.omega_y_effective();
    match stage.kind {
        StageKind::Linear => {
            let omega = (-chi * stage.eta * stage.eta / MU_0).sqrt();
            let wl2 = omega * omega;
            let k_y = match trap.sign {
                TrapSign::AsWritten => wy * wy - wl2,
                TrapSign::Conventional => -(wy * wy + wl2),
            };
            StageFrequencies {
                kind: StageKind::Linear,
                omega,
                k_x: -wl2,
                k_y,
                kappa: 0.0,
                spin_force: particle.nv_moment() * stage.eta,
                bias_force: -chi * m * stage.b0 * stage.eta / MU_0,
                mass: m,
            }
        }
        StageKind::NonLinear => {
            let omega = (-2.0 * chi * stage.b0 * stage.eta / MU_0).sqrt();
            let kappa = (-chi / MU_0).sqrt() * stage.eta;
            StageFrequencies {
                kind: StageKind::NonLinear,
                omega,
                k_x: omega * omega,
                k_y: omega * omega - wy * wy,
                kappa,
                spin_force: 0.0,
                bias_force: 0.0,
                mass: m,
            }
        }
    }
}

/// Field of the linear-gradient map.
pub fn linear_field(b0: f64, eta: f64, x: f64, y: f64) -> FieldSample {
    FieldSample {
        bx: b0 + eta * x,
        by: -eta * y,
    }
}

/// Field of the quadratic (nonlinear) map.
pub fn nonlinear_field(b0: f64, eta: f64, x: f64, y: f64) -> FieldSample {
    FieldSample {
        bx: b0 - eta * (x * x - y * y),
        by: 2.0 * eta * x * y,
    }
}

/// Field of a stage at a point, dispatching on the stage kind.
pub fn field_at(stage: &StageConfig, x: f64, y: f64) -> FieldSample {
    match stage.kind {
        StageKind::Linear => linear_field(stage.b0, stage.eta, x, y),
        StageKind::NonLinear => nonlinear_field(stage.b0, stage.eta, x, y),
    }
}

/// Field component along the spin quantization axis for a particle tilted
/// by beta, including the displacement of the spin site off the center of
/// mass: `d_eta` is (site offset) x (field gradient) [T] and `nv_angle`
/// the built-in axis offset [rad].
pub fn nv_projection(sample: FieldSample, beta: f64, d_eta: f64, nv_angle: f64) -> f64 {
    -sample.by * beta.cos() - sample.bx * beta.sin() + d_eta * (nv_angle + 2.0 * beta).sin()
}

/// Small-oscillation validity of the harmonic reduction of a nonlinear
/// stage at excursion x: ratio (kappa x / omega_nl)^2 must stay below
/// `VALIDITY_THRESHOLD`.
#[derive(Debug, Clone, Copy)]
pub struct ValidityReport {
    pub x_extent: f64,
    pub ratio: f64,
    pub valid: bool,
}

pub const VALIDITY_THRESHOLD: f64 = 0.01;

pub fn check_nonlinear_validity(freq: &StageFrequencies, x_extent: f64) -> ValidityReport {
    let r = freq.kappa * x_extent / freq.omega;
    let ratio = r * r;
    ValidityReport {
        x_extent,
        ratio,
        valid: ratio < VALIDITY_THRESHOLD,
    }
}
