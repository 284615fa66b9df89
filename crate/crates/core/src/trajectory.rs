//! Closed-form center-of-mass trajectories through the five-stage
//! sequence.
//!
//! Within one stage each channel obeys q'' = k q + f with constants from
//! [`fields::stage_frequencies`], so propagation is a product of exact
//! [`OscKernel`] steps; switching is instantaneous and both position and
//! velocity carry across stage boundaries unchanged.
//!
//! Besides the two arms (spin projections from the schedule), the
//! *difference* channel Δ = (x_minus - x_plus, v_minus - v_plus) is
//! propagated directly: it obeys the same linear kernel with drive
//! f_Δ = (s_plus - s_minus) mu eta / m, which involves no bias field B0,
//! so Δ is bit-for-bit independent of B0 in the gradient stages. Closure
//! of the interferometer is a statement about Δ at the final time.

use crate::error::{Error, Result};
use crate::fields::{StageFrequencies, TrapParams};
use crate::osc::OscKernel;
use crate::particle::ParticleSpec;
use crate::schedule::Schedule;
use crate::stage::model_for;

/// Planar center-of-mass state of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialState {
    pub x: f64,
    pub vx: f64,
    pub y: f64,
    pub vy: f64,
}

/// Per-stage propagation data: curvature kernels for the full stage
/// duration plus the frequency/drive bundle.
struct StageStep {
    freq: StageFrequencies,
    tau: f64,
    spin_plus: f64,
    spin_minus: f64,
}

fn stage_steps(schedule: &Schedule, particle: &ParticleSpec, trap: &TrapParams) -> Vec<StageStep> {
    schedule
        .stages()
        .iter()
        .map(|s| StageStep {
            freq: model_for(s.kind).frequencies(s, particle, trap),
            tau: s.tau,
            spin_plus: s.spin_plus,
            spin_minus: s.spin_minus,
        })
        .collect()
}

fn advance_arm(state: SpatialState, step: &StageStep, spin: f64, t_local: f64) -> SpatialState {
    let kx = OscKernel::new(step.freq.k_x, t_local);
    let ky = OscKernel::new(step.freq.k_y, t_local);
    let (x, vx) = kx.step(state.x, state.vx, step.freq.drive_accel(spin));
    let (y, vy) = ky.step(state.y, state.vy, 0.0);
    SpatialState { x, vx, y, vy }
}

fn delta_drive(step: &StageStep) -> f64 {
    (step.spin_plus - step.spin_minus) * step.freq.spin_force / step.freq.mass
}

fn advance_delta(delta: (f64, f64), step: &StageStep, t_local: f64) -> (f64, f64) {
    let kx = OscKernel::new(step.freq.k_x, t_local);
    kx.step(delta.0, delta.1, delta_drive(step))
}

/// Sampled two-arm trajectory with the independently propagated
/// difference channel.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub plus: Vec<SpatialState>,
    pub minus: Vec<SpatialState>,
    /// x_minus - x_plus, from the direct difference propagation.
    pub delta_x: Vec<f64>,
    /// v_minus - v_plus, from the direct difference propagation.
    pub delta_v: Vec<f64>,
    pub transitions: [f64; 5],
}

/// Propagates both arms and the difference channel, sampling each stage
/// uniformly at `samples_per_stage` points (stage end included; t = 0
/// prepended once).
pub fn run_interferometer(
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
    samples_per_stage: usize,
) -> TrajectoryRecord {
    let n = samples_per_stage.max(1);
    let steps = stage_steps(schedule, particle, trap);
    let mut times = Vec::with_capacity(1 + 5 * n);
    let mut plus = Vec::with_capacity(1 + 5 * n);
    let mut minus = Vec::with_capacity(1 + 5 * n);
    let mut delta_x = Vec::with_capacity(1 + 5 * n);
    let mut delta_v = Vec::with_capacity(1 + 5 * n);

    let init = SpatialState {
        x: particle.x0,
        vx: particle.vx0,
        y: particle.y0,
        vy: particle.vy0,
    };
    let mut p = init;
    let mut m = init;
    let mut d = (0.0_f64, 0.0_f64);

    times.push(0.0);
    plus.push(p);
    minus.push(m);
    delta_x.push(d.0);
    delta_v.push(d.1);

    let mut t_start = 0.0;
    for step in &steps {
        for j in 1..=n {
            let t_local = step.tau * (j as f64 / n as f64);
            times.push(t_start + t_local);
            let ps = advance_arm(p, step, step.spin_plus, t_local);
            let ms = advance_arm(m, step, step.spin_minus, t_local);
            let ds = advance_delta(d, step, t_local);
            plus.push(ps);
            minus.push(ms);
            delta_x.push(ds.0);
            delta_v.push(ds.1);
            if j == n {
                p = ps;
                m = ms;
                d = ds;
            }
        }
        t_start += step.tau;
    }

    TrajectoryRecord {
        times,
        plus,
        minus,
        delta_x,
        delta_v,
        transitions: schedule.transitions(),
    }
}

/// Arm states at the five stage ends (index 0 = end of stage 1).
pub fn arm_states_at_transitions(
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
) -> ([SpatialState; 5], [SpatialState; 5]) {
    let steps = stage_steps(schedule, particle, trap);
    let init = SpatialState {
        x: particle.x0,
        vx: particle.vx0,
        y: particle.y0,
        vy: particle.vy0,
    };
    let mut p = init;
    let mut m = init;
    let mut out_p = [SpatialState::default(); 5];
    let mut out_m = [SpatialState::default(); 5];
    for (i, step) in steps.iter().enumerate() {
        p = advance_arm(p, step, step.spin_plus, step.tau);
        m = advance_arm(m, step, step.spin_minus, step.tau);
        out_p[i] = p;
        out_m[i] = m;
    }
    (out_p, out_m)
}

/// Difference channel (x_minus - x_plus, v_minus - v_plus) at the five
/// stage ends.
pub fn delta_at_transitions(schedule: &Schedule, particle: &ParticleSpec) -> [(f64, f64); 5] {
    let steps = stage_steps(schedule, particle, &TrapParams::default());
    let mut d = (0.0, 0.0);
    let mut out = [(0.0, 0.0); 5];
    for (i, step) in steps.iter().enumerate() {
        d = advance_delta(d, step, step.tau);
        out[i] = d;
    }
    out
}

/// Residual of the difference channel at the final time: (Δx, Δv) that a
/// perfectly closed interferometer would bring back to (0, 0).
pub fn closure_residual(schedule: &Schedule, particle: &ParticleSpec) -> (f64, f64) {
    delta_at_transitions(schedule, particle)[4]
}

/// Largest |Δx(t)| over the whole sequence together with the time at
/// which it occurs, found analytically per stage (interior extrema of the
/// trigonometric / hyperbolic solutions plus stage endpoints).
pub fn max_superposition(schedule: &Schedule, particle: &ParticleSpec) -> (f64, f64) {
    let steps = stage_steps(schedule, particle, &TrapParams::default());
    let mut d = (0.0_f64, 0.0_f64);
    let mut best = (0.0_f64, 0.0_f64); // (|dx|, t)
    let mut t_start = 0.0;

    let consider = |val: f64, t: f64, best: &mut (f64, f64)| {
        if val.abs() > best.0 {
            *best = (val.abs(), t);
        }
    };

    for step in &steps {
        let k = step.freq.k_x;
        let f = delta_drive(step);
        let (x0, v0) = d;
        // Interior extrema: times in (0, tau) where the velocity of the
        // difference channel vanishes.
        let mut candidates: Vec<f64> = Vec::new();
        if k < 0.0 {
            let w = (-k).sqrt();
            let eq = -f / k;
            let phi = (v0 / w).atan2(x0 - eq);
            // v = 0 at w t = phi + n pi.
            let mut n = 0;
            loop {
                let t = (phi + n as f64 * std::f64::consts::PI) / w;
                if t >= step.tau {
                    break;
                }
                if t > 0.0 {
                    candidates.push(t);
                }
                n += 1;
                if n > 1_000_000 {
                    break;
                }
            }
        } else if k > 0.0 {
            let w = k.sqrt();
            let eq = -f / k;
            let a = ((x0 - eq) + v0 / w) / 2.0;
            let b = ((x0 - eq) - v0 / w) / 2.0;
            if a != 0.0 && b / a > 0.0 {
                let t = (b / a).ln() / (2.0 * w);
                if t > 0.0 && t < step.tau {
                    candidates.push(t);
                }
            }
        } else if f != 0.0 {
            let t = -v0 / f;
            if t > 0.0 && t < step.tau {
                candidates.push(t);
            }
        }
        candidates.push(step.tau);
        for t_local in candidates {
            let (x, _) = advance_delta(d, step, t_local);
            consider(x, t_start + t_local, &mut best);
        }
        d = advance_delta(d, step, step.tau);
        t_start += step.tau;
    }
    best
}

/// Peak separation of the idealized variant in which each stage is
/// entered at rest (the velocity accumulated in the previous stage is
/// dropped): 4 mu eta_1 / (m omega_1^2) *
/// hypot(cosh(omega_2 tau_2), (omega_2/omega_1) sinh(omega_2 tau_2)).
/// The factor 4 is the rest-entry amplitude after the first half period
/// of full splitting.
pub fn max_superposition_velocity_free(schedule: &Schedule, particle: &ParticleSpec) -> f64 {
    let trap = TrapParams::default();
    let stages = schedule.stages();
    let f1 = model_for(stages[0].kind).frequencies(&stages[0], particle, &trap);
    let f2 = model_for(stages[1].kind).frequencies(&stages[1], particle, &trap);
    let w1 = f1.omega;
    let w2 = f2.omega;
    let amp = 4.0 * f1.spin_force / (particle.mass * w1 * w1);
    let arg = w2 * stages[1].tau;
    amp * (arg.cosh()).hypot(w2 / w1 * arg.sinh())
}

/// Options of the final-stage closure search.
#[derive(Debug, Clone, Copy)]
pub struct TuneOptions {
    /// Acceptance threshold on |Δx(t5)| [m].
    pub tol_dx: f64,
    /// Acceptance threshold on |Δv(t5)| [m/s].
    pub tol_dv: f64,
    pub max_iters: usize,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            tol_dx: 1e-9,
            tol_dv: 1e-9,
            max_iters: 100,
        }
    }
}

/// Outcome of a closure search.
#[derive(Debug, Clone, Copy)]
pub struct TuneReport {
    pub eta5: f64,
    pub tau5: f64,
    pub iterations: usize,
    pub residual_dx: f64,
    pub residual_dv: f64,
}

const ETA_BOUNDS: (f64, f64) = (1.0, 1e6);
const TAU_BOUNDS: (f64, f64) = (1e-6, 10.0);

/// Tunes the final stage (eta_5, tau_5) so that the difference channel
/// returns to the origin, by damped Newton iteration on the residual
/// (Δx(t5), Δv(t5)) seeded from the schedule's current final stage.
///
/// The state at the end of stage 4 is fixed by stages 1-4 and computed
/// once; each residual evaluation is a single oscillator step. Returns
/// the retuned schedule and a report, or [`Error::NoConvergence`] with
/// the best residual seen.
pub fn tune_closure(
    schedule: &Schedule,
    particle: &ParticleSpec,
    opts: &TuneOptions,
) -> Result<(Schedule, TuneReport)> {
    let trap = TrapParams::default();
    let steps = stage_steps(schedule, particle, &trap);
    let mut d4 = (0.0, 0.0);
    for step in &steps[..4] {
        d4 = advance_delta(d4, step, step.tau);
    }
    let stage5 = &schedule.stages()[4];
    let spin_gap = stage5.spin_plus - stage5.spin_minus;
    let chi = particle.susceptibility;
    let mu = particle.nv_moment();
    let m = particle.mass;

    // Residual of the difference channel at t5 for trial (eta, tau).
    let residual = |eta: f64, tau: f64| -> (f64, f64) {
        let k = chi * eta * eta / crate::constants::MU_0; // -omega_l^2
        let f = spin_gap * mu * eta / m;
        OscKernel::new(k, tau).step(d4.0, d4.1, f)
    };
    let norm = |r: (f64, f64)| -> f64 {
        (r.0.abs() / opts.tol_dx).max(r.1.abs() / opts.tol_dv)
    };

    let mut eta = stage5.eta;
    let mut tau = stage5.tau;
    let mut r = residual(eta, tau);
    let mut best = (r, eta, tau);
    let mut iterations = 0;

    while norm(r) >= 1.0 {
        if iterations >= opts.max_iters || !r.0.is_finite() || !r.1.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                best_dx: best.0 .0,
                best_dv: best.0 .1,
            });
        }
        iterations += 1;

        // Central-difference Jacobian.
        let he = (1e-6 * eta.abs()).max(1e-3);
        let ht = (1e-6 * tau.abs()).max(1e-9);
        let rp_e = residual(eta + he, tau);
        let rm_e = residual(eta - he, tau);
        let rp_t = residual(eta, tau + ht);
        let rm_t = residual(eta, tau - ht);
        let j11 = (rp_e.0 - rm_e.0) / (2.0 * he);
        let j21 = (rp_e.1 - rm_e.1) / (2.0 * he);
        let j12 = (rp_t.0 - rm_t.0) / (2.0 * ht);
        let j22 = (rp_t.1 - rm_t.1) / (2.0 * ht);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                best_dx: best.0 .0,
                best_dv: best.0 .1,
            });
        }
        let de = -(j22 * r.0 - j12 * r.1) / det;
        let dt = -(-j21 * r.0 + j11 * r.1) / det;

        // Damped line search on the tolerance-scaled norm.
        let n0 = norm(r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let e_try = (eta + lambda * de).clamp(ETA_BOUNDS.0, ETA_BOUNDS.1);
            let t_try = (tau + lambda * dt).clamp(TAU_BOUNDS.0, TAU_BOUNDS.1);
            let r_try = residual(e_try, t_try);
            if r_try.0.is_finite() && r_try.1.is_finite() && norm(r_try) < n0 {
                eta = e_try;
                tau = t_try;
                r = r_try;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                best_dx: best.0 .0,
                best_dv: best.0 .1,
            });
        }
        if norm(r) < norm(best.0) {
            best = (r, eta, tau);
        }
    }

    let report = TuneReport {
        eta5: eta,
        tau5: tau,
        iterations,
        residual_dx: r.0,
        residual_dv: r.1,
    };
    Ok((schedule.with_final_stage(eta, tau)?, report))
}
