//! Coupled translational-rotational dynamics of one arm, integrated
//! numerically.
//!
//! Arm state vector (8 components, indices in [`idx`]):
//!
//! ```text
//!     [x, vx, y, vy, beta, beta_dot, alpha, gamma]
//! ```
//!
//! (beta, alpha, gamma) are the nutation, precession, and body-spin Euler
//! angles of the (spherically symmetric) rotor. The two conserved
//! canonical momenta p_alpha = I Omega0 cos(beta0) and p_gamma = I Omega0
//! are fixed by the initial fast spin, which reduces the orientation
//! dynamics to a single second-order equation for beta plus quadratures
//! for alpha and gamma:
//!
//! ```text
//!     beta'' = (p_a - p_g cos b)(p_a cos b - p_g)/(I^2 sin^3 b)
//!              - mu s B_nv(x, y, b)/I
//!     alpha' = Omega0 (cos beta0 - cos b)/sin^2 b
//!     gamma' = Omega0 (1 - cos beta0 cos b)/sin^2 b
//! ```
//!
//! The tilt feeds back on the translation: the spin force along x picks
//! up cos(beta) and leaks a component (mu s eta / m) sin(beta) into y.

pub mod integrator;

use crate::error::{Error, Result};
use crate::fields::{self, StageFrequencies, TrapParams};
use crate::particle::{Arm, ParticleSpec};
use crate::schedule::{Schedule, StageConfig};
use crate::stage::model_for;
use crate::trajectory::SpatialState;
use integrator::{integrate, IntegratorOptions, OdeSystem};

/// Indices into the 8-component arm state.
pub mod idx {
    pub const X: usize = 0;
    pub const VX: usize = 1;
    pub const Y: usize = 2;
    pub const VY: usize = 3;
    pub const BETA: usize = 4;
    pub const BETA_DOT: usize = 5;
    pub const ALPHA: usize = 6;
    pub const GAMMA: usize = 7;
}

pub const STATE_DIM: usize = 8;

/// Guard: the Euler-angle reduction is singular where sin(beta) -> 0.
const SIN_BETA_FLOOR: f64 = 1e-6;

/// Model switches for a coupled run.
#[derive(Debug, Clone, Copy)]
pub struct DynamicsFlags {
    /// When false the orientation channels are frozen at zero tilt and
    /// the translation reduces to the closed-form stage kernels.
    pub rotation_on: bool,
}

impl Default for DynamicsFlags {
    fn default() -> Self {
        DynamicsFlags { rotation_on: true }
    }
}

/// Spatial-only right-hand side of one stage (tilt ignored), as used by
/// the independent cross-check of the closed-form kernels. State layout:
/// [x, vx, y, vy].
pub fn spatial_rhs(freq: &StageFrequencies, spin: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
    dy[0] = y[1];
    dy[1] = freq.k_x * y[0] + freq.drive_accel(spin);
    dy[2] = y[3];
    dy[3] = freq.k_y * y[2];
}

/// One stage of the coupled model for one arm.
struct ArmStage<'a> {
    stage: &'a StageConfig,
    freq: StageFrequencies,
    spin: f64,
    particle: &'a ParticleSpec,
    rotation_on: bool,
    /// I Omega0 cos(beta0): precession momentum.
    p_alpha: f64,
    /// I Omega0: body-spin momentum.
    p_gamma: f64,
}

impl<'a> OdeSystem<STATE_DIM> for ArmStage<'a> {
    fn rhs(&self, t: f64, y: &[f64; STATE_DIM], dy: &mut [f64; STATE_DIM]) -> Result<()> {
        let m = self.particle.mass;
        let x = y[idx::X];
        let yy = y[idx::Y];

        if !self.rotation_on {
            dy[idx::X] = y[idx::VX];
            dy[idx::VX] = self.freq.k_x * x + self.freq.drive_accel(self.spin);
            dy[idx::Y] = y[idx::VY];
            dy[idx::VY] = self.freq.k_y * yy;
            dy[idx::BETA] = 0.0;
            dy[idx::BETA_DOT] = 0.0;
            dy[idx::ALPHA] = 0.0;
            dy[idx::GAMMA] = 0.0;
            return Ok(());
        }

        let beta = y[idx::BETA];
        let (sin_b, cos_b) = beta.sin_cos();
        if sin_b.abs() < SIN_BETA_FLOOR {
            return Err(Error::BetaSingularity { t, sin_beta: sin_b });
        }

        // Translation with tilt feedback on the spin force.
        let spin_force = self.spin * self.freq.spin_force;
        dy[idx::X] = y[idx::VX];
        dy[idx::VX] =
            self.freq.k_x * x - (spin_force * cos_b + self.freq.bias_force) / m;
        dy[idx::Y] = y[idx::VY];
        dy[idx::VY] = self.freq.k_y * yy + spin_force * sin_b / m;

        // Orientation.
        let i_m = self.particle.moment_of_inertia();
        let sample = fields::field_at(self.stage, x, yy);
        let d_eta = self.particle.nv_offset * self.stage.eta;
        let b_nv = fields::nv_projection(sample, beta, d_eta, self.particle.nv_angle);
        let sin2 = sin_b * sin_b;
        let g = (self.p_alpha - self.p_gamma * cos_b) * (self.p_alpha * cos_b - self.p_gamma)
            / (i_m * i_m * sin2 * sin_b);
        dy[idx::BETA] = y[idx::BETA_DOT];
        dy[idx::BETA_DOT] = g - self.particle.nv_moment() * self.spin * b_nv / i_m;

        let omega0 = self.particle.omega0;
        let cos_b0 = self.particle.beta0.cos();
        dy[idx::ALPHA] = omega0 * (cos_b0 - cos_b) / sin2;
        dy[idx::GAMMA] = omega0 * (1.0 - cos_b0 * cos_b) / sin2;
        Ok(())
    }
}

/// Initial 8-component state for one arm.
pub fn initial_state(particle: &ParticleSpec, flags: &DynamicsFlags) -> [f64; STATE_DIM] {
    let mut s = [0.0; STATE_DIM];
    s[idx::X] = particle.x0;
    s[idx::VX] = particle.vx0;
    s[idx::Y] = particle.y0;
    s[idx::VY] = particle.vy0;
    s[idx::BETA] = if flags.rotation_on { particle.beta0 } else { 0.0 };
    s
}

/// Integrates one arm through the whole schedule, invoking `on_sample`
/// at `samples_per_stage` uniform times per stage (stage ends included;
/// t = 0 emitted once at the start). Returns the final state.
#[allow(clippy::too_many_arguments)]
pub fn simulate_arm_streaming(
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
    flags: &DynamicsFlags,
    opts: &IntegratorOptions,
    samples_per_stage: usize,
    arm: Arm,
    on_sample: &mut dyn FnMut(f64, &[f64; STATE_DIM]),
) -> Result<[f64; STATE_DIM]> {
    let n = samples_per_stage.max(1);
    let i_m = particle.moment_of_inertia();
    let p_gamma = i_m * particle.omega0;
    let p_alpha = p_gamma * particle.beta0.cos();

    let mut state = initial_state(particle, flags);
    on_sample(0.0, &state);
    let mut t_start = 0.0;
    for stage in schedule.stages() {
        let sys = ArmStage {
            stage,
            freq: model_for(stage.kind).frequencies(stage, particle, trap),
            spin: stage.spin(arm),
            particle,
            rotation_on: flags.rotation_on,
            p_alpha,
            p_gamma,
        };
        let t_end = t_start + stage.tau;
        let samples: Vec<f64> = (1..=n)
            .map(|j| t_start + stage.tau * (j as f64 / n as f64))
            .collect();
        state = integrate(&sys, t_start, t_end, state, opts, &samples, on_sample)?;
        t_start = t_end;
    }
    Ok(state)
}

/// Sampled coupled run of both arms.
#[derive(Debug, Clone)]
pub struct CoupledRecord {
    pub times: Vec<f64>,
    pub plus: Vec<[f64; STATE_DIM]>,
    pub minus: Vec<[f64; STATE_DIM]>,
    pub transitions: [f64; 5],
}

impl CoupledRecord {
    pub fn delta(&self, component: usize, i: usize) -> f64 {
        self.minus[i][component] - self.plus[i][component]
    }

    /// Spatial state of one arm sample.
    pub fn spatial(&self, arm: Arm, i: usize) -> SpatialState {
        let s = match arm {
            Arm::Plus => &self.plus[i],
            Arm::Minus => &self.minus[i],
        };
        SpatialState {
            x: s[idx::X],
            vx: s[idx::VX],
            y: s[idx::Y],
            vy: s[idx::VY],
        }
    }
}

/// Runs both arms (in parallel) through the schedule and collects the
/// sampled states.
pub fn simulate_coupled(
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
    flags: &DynamicsFlags,
    opts: &IntegratorOptions,
    samples_per_stage: usize,
) -> Result<CoupledRecord> {
    let run_arm = |arm: Arm| -> Result<(Vec<f64>, Vec<[f64; STATE_DIM]>)> {
        let mut times = Vec::new();
        let mut states = Vec::new();
        simulate_arm_streaming(
            schedule,
            particle,
            trap,
            flags,
            opts,
            samples_per_stage,
            arm,
            &mut |t, s| {
                times.push(t);
                states.push(*s);
            },
        )?;
        Ok((times, states))
    };

    let (res_p, res_m) = std::thread::scope(|scope| {
        let hp = scope.spawn(|| run_arm(Arm::Plus));
        let hm = scope.spawn(|| run_arm(Arm::Minus));
        (
            hp.join().expect("plus-arm thread panicked"),
            hm.join().expect("minus-arm thread panicked"),
        )
    });
    let (times, plus) = res_p?;
    let (_, minus) = res_m?;

    Ok(CoupledRecord {
        times,
        plus,
        minus,
        transitions: schedule.transitions(),
    })
}
