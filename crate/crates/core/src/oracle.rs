//! Independent numerical cross-checks ("oracles") for the analytic
//! machinery: a direct quadrature of the exact stage propagator for wave
//! packets, a quadrature overlap integral, and finite-difference Maxwell
//! residuals for the field maps.
//!
//! Nothing here reuses the composed-parameter path in
//! [`crate::wavepacket`]; agreement between the two routes is what the
//! verification suite asserts.

use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::fields::FieldSample;
use crate::osc::OscKernel;
use crate::schedule::StageConfig;
use crate::stage::model_for;
use crate::wavepacket::PacketState;

/// Composite-Simpson quadrature of a complex integrand with interval
/// doubling until two successive refinements agree to `tol` relative to
/// the result, or down to the double-precision rounding floor of the
/// integrand's L1 mass.
///
/// The floor matters for oscillatory integrands: where the result comes
/// from cancellation of a much larger integrand mass (e.g. the tail of a
/// propagated packet), no refinement can push the successive difference
/// below roughly epsilon times that mass, and demanding more would spin
/// forever.
pub fn simpson_complex(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    n_start: usize,
    n_max: usize,
) -> Result<Complex64> {
    assert!(b > a);
    // Returns (integral, L1 mass of the integrand).
    let eval = |n: usize| -> (Complex64, f64) {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        let mut l1 = acc.norm();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            let v = f(a + i as f64 * h);
            acc += w * v;
            l1 += w * v.norm();
        }
        (acc * (h / 3.0), l1 * (h / 3.0))
    };
    let mut n = n_start.next_power_of_two().max(4);
    let (mut prev, _) = eval(n);
    while n < n_max {
        n *= 2;
        let (cur, l1) = eval(n);
        let floor = 32.0 * f64::EPSILON * l1;
        if (cur - prev).norm() <= tol * (1.0 + cur.norm()) + floor {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        iterations: n,
        best_dx: prev.re,
        best_dv: prev.im,
    })
}

/// Exact propagator of H = p^2/2m - (m k/2) x^2 - F x over `tau`,
/// evaluated as a function K(x_f, x_i), with the classical action
///
/// ```text
///     S_cl = (m/2S)[(x_i^2 + x_f^2) C - 2 x_i x_f]
///            + F (x_i + x_f) D/S - (F^2/2mk)(tau - 2 D/S)
/// ```
///
/// and prefactor sqrt(m / (2 pi i hbar S)) (principal branch).
pub struct NumericPropagator {
    pub k: f64,
    pub f_accel: f64,
    pub tau: f64,
    pub mass: f64,
    kernel: OscKernel,
    action_const: f64,
    prefactor: Complex64,
}

impl NumericPropagator {
    pub fn new(k: f64, f_accel: f64, tau: f64, mass: f64) -> Result<Self> {
        let kernel = OscKernel::new(k, tau);
        if kernel.s.abs() < 1e-12 * tau {
            return Err(Error::PropagatorCaustic { tau });
        }
        let force = mass * f_accel;
        let action_const = if (k * tau * tau).abs() < 1e-12 {
            -force * force * tau.powi(3) / (24.0 * mass)
        } else {
            -(force * force / (2.0 * mass * k)) * (tau - 2.0 * kernel.d / kernel.s)
        };
        let prefactor =
            (Complex64::new(0.0, -1.0) * mass / (2.0 * std::f64::consts::PI * HBAR * kernel.s))
                .sqrt();
        Ok(NumericPropagator {
            k,
            f_accel,
            tau,
            mass,
            kernel,
            action_const,
            prefactor,
        })
    }

    pub fn kernel_value(&self, x_f: f64, x_i: f64) -> Complex64 {
        let (c, s, d) = (self.kernel.c, self.kernel.s, self.kernel.d);
        let force = self.mass * self.f_accel;
        let action = self.mass / (2.0 * s) * ((x_i * x_i + x_f * x_f) * c - 2.0 * x_i * x_f)
            + force * (x_i + x_f) * d / s
            + self.action_const;
        self.prefactor * Complex64::from_polar(1.0, action / HBAR)
    }

    /// psi_out(x_f) by direct quadrature of K against the source packet.
    pub fn amplitude(&self, source: &PacketState, x_f: f64) -> Result<Complex64> {
        let half = 10.0 * source.sigma;
        let f = |x_i: f64| self.kernel_value(x_f, x_i) * source.amplitude(x_i);
        simpson_complex(&f, source.x_c - half, source.x_c + half, 1e-12, 512, 1 << 21)
    }
}

/// L2 norm, mean, and width of a numerically propagated packet, computed
/// by an outer Simpson quadrature of |psi|^2 over a caller-chosen window.
#[derive(Debug, Clone, Copy)]
pub struct NumericMoments {
    pub norm: f64,
    pub mean: f64,
    pub sigma: f64,
}

pub fn numeric_moments(
    prop: &NumericPropagator,
    source: &PacketState,
    window_center: f64,
    window_half: f64,
    n_outer: usize,
) -> Result<NumericMoments> {
    let n = n_outer.next_power_of_two().max(64);
    let a = window_center - window_half;
    let h = 2.0 * window_half / n as f64;
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in 0..=n {
        let x = a + i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let p = prop.amplitude(source, x)?.norm_sqr();
        m0 += w * p;
        m1 += w * p * x;
        m2 += w * p * x * x;
    }
    m0 *= h / 3.0;
    m1 *= h / 3.0;
    m2 *= h / 3.0;
    let mean = m1 / m0;
    let var = m2 / m0 - mean * mean;
    Ok(NumericMoments {
        norm: m0,
        mean,
        sigma: var.max(0.0).sqrt(),
    })
}

/// <psi_L | psi_R> by quadrature over a window covering both packets.
pub fn overlap_quadrature(left: &PacketState, right: &PacketState) -> Result<Complex64> {
    let center = 0.5 * (left.x_c + right.x_c);
    let half = 0.5 * (left.x_c - right.x_c).abs() + 10.0 * left.sigma.max(right.sigma);
    let f = |x: f64| left.amplitude(x).conj() * right.amplitude(x);
    simpson_complex(&f, center - half, center + half, 1e-13, 256, 1 << 20)
}

/// Worst relative divergence and curl of a stage field over a centered
/// square grid, by central differences.
#[derive(Debug, Clone, Copy)]
pub struct MaxwellReport {
    pub max_div_rel: f64,
    pub max_curl_rel: f64,
    /// Gradient magnitude used as the normalization scale [T/m].
    pub scale: f64,
}

pub fn maxwell_residuals(stage: &StageConfig, half_extent: f64, n: usize) -> MaxwellReport {
    let model = model_for(stage.kind);
    let n = n.max(3);
    let h = half_extent / 50.0; // stencil spacing decoupled from grid pitch
    let field = |x: f64, y: f64| -> FieldSample { model.field(stage, x, y) };
    let mut max_div = 0.0_f64;
    let mut max_curl = 0.0_f64;
    let mut scale = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let x = -half_extent + 2.0 * half_extent * i as f64 / (n - 1) as f64;
            let y = -half_extent + 2.0 * half_extent * j as f64 / (n - 1) as f64;
            let fxp = field(x + h, y);
            let fxm = field(x - h, y);
            let fyp = field(x, y + h);
            let fym = field(x, y - h);
            let dbx_dx = (fxp.bx - fxm.bx) / (2.0 * h);
            let dby_dx = (fxp.by - fxm.by) / (2.0 * h);
            let dbx_dy = (fyp.bx - fym.bx) / (2.0 * h);
            let dby_dy = (fyp.by - fym.by) / (2.0 * h);
            let local_scale = dbx_dx
                .abs()
                .max(dby_dy.abs())
                .max(dby_dx.abs())
                .max(dbx_dy.abs());
            scale = scale.max(local_scale);
            max_div = max_div.max((dbx_dx + dby_dy).abs());
            max_curl = max_curl.max((dby_dx - dbx_dy).abs());
        }
    }
    let denom = scale.max(f64::MIN_POSITIVE);
    MaxwellReport {
        max_div_rel: max_div / denom,
        max_curl_rel: max_curl / denom,
        scale,
    }
}
