//! Gaussian wave-packet evolution along the separation axis.
//!
//! A packet is parameterized as
//!
//! ```text
//!     psi(x) = (2 pi sigma^2)^(-1/4)
//!              exp[ -(x - x_c)^2 / (4 sigma^2) + i (a x^2/4 + b x + c) ]
//! ```
//!
//! (the quadratic phase rides on absolute x, not x - x_c). The mean
//! momentum is <p> = hbar (b + a x_c / 2).
//!
//! Each stage Hamiltonian is quadratic, H = p^2/2m - (m k/2) x^2 - F x
//! with constant curvature k and force F, so its propagator is Gaussian
//! and maps the five parameters exactly. With the stage kernel C, S,
//! D = (C-1)/k (see [`crate::osc`]) and the shorthand
//!
//! ```text
//!     P = 1/(4 sigma^2),   T1 = S P,   T2 = a S/4 + (m/2hbar) C,
//!     W = T1 - i T2,
//! ```
//!
//! the updated parameters come from the composed complex quadratic form
//! exp(alpha2 x^2 + alpha1 x + alpha0):
//!
//! ```text
//!     alpha2 = [ (m/2hbar) C (a + 4iP) + (m/hbar)^2 k S ] / (4W)
//!     alpha1 = [ F m S/hbar^2 + F D (a/2 + 2iP)/hbar
//!                - i (m/hbar)(x_c/(2 sigma^2) + i b) ] / (2W)
//!     alpha0 = S beta0^2/(4W) - x_c^2/(4 sigma^2) + i (c + Phi_F),
//!       beta0 = x_c/(2 sigma^2) + i (b + F D/(hbar S)),
//!       Phi_F = -(F^2/(2 m hbar k)) (tau - 2 D/S)
//! ```
//!
//! plus the constant phase of the Gaussian prefactor sqrt(m/(2 i hbar W))
//! (principal branch), which is -arg(i W)/2. The grouped forms above are
//! cancellation-free at interior refocusing points (S -> 0) except for
//! the driven constant phase, which diverges physically at a caustic;
//! that case is reported as an error rather than silently evaluated.

use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::osc::OscKernel;

/// Gaussian packet parameters along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketState {
    /// Width [m].
    pub sigma: f64,
    /// Center [m].
    pub x_c: f64,
    /// Quadratic phase coefficient [1/m^2].
    pub a: f64,
    /// Linear phase coefficient [1/m].
    pub b: f64,
    /// Constant phase [rad].
    pub c: f64,
}

impl PacketState {
    /// Minimum-uncertainty packet at rest.
    pub fn ground(sigma: f64, x_c: f64) -> Self {
        PacketState {
            sigma,
            x_c,
            a: 0.0,
            b: 0.0,
            c: 0.0,
        }
    }

    /// Packet with a given mean velocity.
    pub fn moving(sigma: f64, x_c: f64, v: f64, mass: f64) -> Self {
        PacketState {
            sigma,
            x_c,
            a: 0.0,
            b: mass * v / HBAR,
            c: 0.0,
        }
    }

    /// Mean momentum hbar (b + a x_c / 2) [kg m/s].
    pub fn mean_momentum(&self) -> f64 {
        HBAR * (self.b + self.a * self.x_c / 2.0)
    }

    pub fn mean_velocity(&self, mass: f64) -> f64 {
        self.mean_momentum() / mass
    }

    /// Normalized amplitude at a point.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let norm = (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25);
        let d = x - self.x_c;
        let envelope = (-d * d / (4.0 * self.sigma * self.sigma)).exp();
        let phase = self.a * x * x / 4.0 + self.b * x + self.c;
        Complex64::from_polar(norm * envelope, phase)
    }
}

/// Relative floor on |S| below which a driven stage is too close to a
/// focusing caustic for the constant phase to be meaningful.
const CAUSTIC_REL_FLOOR: f64 = 1e-12;

/// Evolves a packet through one stage of curvature `k`, constant
/// acceleration `f_accel` = F/m, and duration `tau`.
pub fn evolve_stage(
    packet: &PacketState,
    k: f64,
    f_accel: f64,
    tau: f64,
    mass: f64,
) -> Result<PacketState> {
    if tau == 0.0 {
        return Ok(*packet);
    }
    let ker = OscKernel::new(k, tau);
    let (c_fn, s_fn, d_fn) = (ker.c, ker.s, ker.d);
    let force = mass * f_accel;

    if force != 0.0 && s_fn.abs() < CAUSTIC_REL_FLOOR * tau {
        return Err(Error::CausticProximity { s_abs: s_fn.abs() });
    }

    let sig2 = packet.sigma * packet.sigma;
    let p_coef = 1.0 / (4.0 * sig2);
    let m2h = mass / (2.0 * HBAR);
    let t1 = s_fn * p_coef;
    let t2 = packet.a * s_fn / 4.0 + m2h * c_fn;
    let w = Complex64::new(t1, -t2);
    if w.norm() == 0.0 {
        return Err(Error::PropagatorCaustic { tau });
    }

    // alpha2 and the width.
    let a_plus_4ip = Complex64::new(packet.a, 4.0 * p_coef);
    let alpha2 = (m2h * c_fn * a_plus_4ip + (mass / HBAR).powi(2) * k * s_fn) / (4.0 * w);
    let sigma2_out = (HBAR / mass).powi(2) * (t1 * t1 + t2 * t2) / p_coef;
    let sigma_out = sigma2_out.sqrt();
    let a_out = 4.0 * alpha2.im;

    // alpha1: center and linear phase.
    let lin0 = Complex64::new(packet.x_c / (2.0 * sig2), packet.b);
    let alpha1 = (Complex64::new(force * mass * s_fn / (HBAR * HBAR), 0.0)
        + force * d_fn / HBAR * Complex64::new(packet.a / 2.0, 2.0 * p_coef)
        - Complex64::i() * (mass / HBAR) * lin0)
        / (2.0 * w);
    let b_out = alpha1.im;
    let x_c_out = 2.0 * sigma2_out * alpha1.re;

    // alpha0: constant phase, including the prefactor branch.
    let (a_tilde, phi_f) = if force == 0.0 {
        (0.0, 0.0)
    } else {
        let a_tilde = force * d_fn / (HBAR * s_fn);
        let phi_f = if (k * tau * tau).abs() < 1e-12 {
            -force * force * tau.powi(3) / (24.0 * mass * HBAR)
        } else {
            -(force * force / (2.0 * mass * HBAR * k)) * (tau - 2.0 * d_fn / s_fn)
        };
        (a_tilde, phi_f)
    };
    let beta0 = Complex64::new(packet.x_c / (2.0 * sig2), packet.b + a_tilde);
    let alpha0 = s_fn * beta0 * beta0 / (4.0 * w) - packet.x_c * packet.x_c / (4.0 * sig2)
        + Complex64::i() * (packet.c + phi_f);
    let c_out = alpha0.im - (Complex64::i() * w).arg() / 2.0;

    Ok(PacketState {
        sigma: sigma_out,
        x_c: x_c_out,
        a: a_out,
        b: b_out,
        c: c_out,
    })
}

/// Width of a packet evolving in a *restoring* harmonic stage
/// (k = -omega^2) as an explicit function of time — an independent
/// closed form used to cross-check [`evolve_stage`]:
///
/// sigma(t) = sigma0 sqrt[ (hbar/(2 m omega sigma0^2))^2 sin^2
///            + ((a0 hbar/(2 m omega)) sin + cos)^2 ]
pub fn harmonic_width(sigma0: f64, a0: f64, omega: f64, mass: f64, t: f64) -> f64 {
    let (s, c) = (omega * t).sin_cos();
    let u = HBAR / (2.0 * mass * omega * sigma0 * sigma0) * s;
    let v = a0 * HBAR / (2.0 * mass * omega) * s + c;
    sigma0 * u.hypot(v)
}
