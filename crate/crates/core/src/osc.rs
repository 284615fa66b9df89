//! Unified constant-coefficient oscillator kernel.
//!
//! Every stage reduces each spatial channel to
//!
//! ```text
//!     q''(t) = k q(t) + f
//! ```
//!
//! with a signed curvature `k` [1/s^2] and a constant drive `f` [m/s^2].
//! The fundamental pair (C, S) solves the homogeneous equation with
//! C(0) = 1, C'(0) = 0, S(0) = 0, S'(0) = 1:
//!
//! * k < 0 (restoring): C = cos(w t), S = sin(w t)/w, w = sqrt(-k)
//! * k > 0 (inverted):  C = cosh(w t), S = sinh(w t)/w, w = sqrt(k)
//! * k = 0 (free):      C = 1, S = t
//!
//! The drive enters through D = (C - 1)/k (with its polynomial limit
//! t^2/2 at k = 0), giving the exact step
//!
//! ```text
//!     q(t) = C q0 + S v0 + D f
//!     v(t) = k S q0 + C v0 + S f
//! ```
//!
//! Useful identities: C^2 - k S^2 = 1, C' = k S, S' = C, D' = S.

/// Fundamental solution of q'' = k q over a fixed interval.
#[derive(Debug, Clone, Copy)]
pub struct OscKernel {
    /// Signed curvature [1/s^2].
    pub k: f64,
    /// Interval length [s].
    pub tau: f64,
    /// C(tau) (cosine-like).
    pub c: f64,
    /// S(tau) (sine-like) [s].
    pub s: f64,
    /// D(tau) = (C - 1)/k [s^2]; drive response.
    pub d: f64,
}

/// Below this value of |k| tau^2 the closed forms lose digits to
/// cancellation and the series (truncated after the k^2 term, next term
/// ~ (|k| tau^2)^3 < 1e-36 relative) is exact to double precision.
const SERIES_THRESHOLD: f64 = 1e-12;

impl OscKernel {
    pub fn new(k: f64, tau: f64) -> Self {
        let x = k * tau * tau;
        if x.abs() < SERIES_THRESHOLD {
            // C = 1 + x/2 + x^2/24, S = tau (1 + x/6 + x^2/120),
            // D = tau^2 (1/2 + x/24 + x^2/720)
            let c = 1.0 + x * (0.5 + x / 24.0);
            let s = tau * (1.0 + x * (1.0 / 6.0 + x / 120.0));
            let d = tau * tau * (0.5 + x * (1.0 / 24.0 + x / 720.0));
            return OscKernel { k, tau, c, s, d };
        }
        if k < 0.0 {
            let w = (-k).sqrt();
            let wt = w * tau;
            let half = (0.5 * wt).sin();
            // C - 1 = -2 sin^2(wt/2): stable near wt = 0.
            let cm1 = -2.0 * half * half;
            OscKernel {
                k,
                tau,
                c: wt.cos(),
                s: wt.sin() / w,
                d: cm1 / k,
            }
        } else {
            let w = k.sqrt();
            let wt = w * tau;
            let half = (0.5 * wt).sinh();
            // C - 1 = 2 sinh^2(wt/2).
            let cm1 = 2.0 * half * half;
            OscKernel {
                k,
                tau,
                c: wt.cosh(),
                s: wt.sinh() / w,
                d: cm1 / k,
            }
        }
    }

    /// Angular frequency scale sqrt(|k|) [rad/s] (0 for the free case).
    pub fn omega(&self) -> f64 {
        self.k.abs().sqrt()
    }

    /// Advances (q, v) through the interval under constant drive f.
    pub fn step(&self, q: f64, v: f64, f: f64) -> (f64, f64) {
        (
            self.c * q + self.s * v + self.d * f,
            self.k * self.s * q + self.c * v + self.s * f,
        )
    }

    /// Equilibrium displacement -f/k of the driven oscillator
    /// (meaningless for k = 0; callers guard).
    pub fn equilibrium(f: f64, k: f64) -> f64 {
        -f / k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wronskian_identity_all_regimes() {
        for &(k, tau) in &[
            (-123345.0808_f64, 0.0044601_f64),
            (4933.803, 0.1099),
            (0.0, 0.37),
            (-1e-9, 2.0),
            (1e-11, 3.0),
        ] {
            let ker = OscKernel::new(k, tau);
            let w = ker.c * ker.c - k * ker.s * ker.s;
            // The residual of the identity scales with the size of the
            // cancelling terms (C^2 ~ 1.3e6 for the inverted case here),
            // so the tolerance must too.
            let scale = 1.0 + ker.c * ker.c + (k * ker.s * ker.s).abs();
            assert!(
                (w - 1.0).abs() < 1e-14 * scale,
                "C^2 - k S^2 = {w} for k={k}, tau={tau}"
            );
        }
    }

    #[test]
    fn free_case_is_polynomial() {
        let ker = OscKernel::new(0.0, 2.5);
        assert_eq!(ker.c, 1.0);
        assert_eq!(ker.s, 2.5);
        assert_eq!(ker.d, 0.5 * 2.5 * 2.5);
        let (q, v) = ker.step(1.0, 2.0, 3.0);
        assert_eq!(q, 1.0 + 2.0 * 2.5 + 3.0 * 0.5 * 2.5 * 2.5);
        assert_eq!(v, 2.0 + 3.0 * 2.5);
    }

    #[test]
    fn series_matches_closed_form_at_threshold() {
        // Just above the series threshold both branches must agree.
        for &k in &[-1.0_f64, 1.0] {
            let tau = 1.1e-6; // |k| tau^2 = 1.21e-12 > threshold
            let exact = OscKernel::new(k, tau);
            let x = k * tau * tau;
            let c_series = 1.0 + x * (0.5 + x / 24.0);
            let s_series = tau * (1.0 + x * (1.0 / 6.0 + x / 120.0));
            assert!((exact.c - c_series).abs() <= 2.0 * f64::EPSILON);
            assert!((exact.s - s_series).abs() <= 2.0 * f64::EPSILON * tau);
        }
    }

    #[test]
    fn trig_step_matches_reference() {
        // Driven restoring oscillator against the textbook solution.
        let (w, f, q0, v0, t) = (3.0_f64, 0.7, 0.2, -0.4, 0.9);
        let ker = OscKernel::new(-w * w, t);
        let (q, v) = ker.step(q0, v0, f);
        let eq = f / (w * w);
        let qr = eq + (q0 - eq) * (w * t).cos() + v0 / w * (w * t).sin();
        let vr = -(q0 - eq) * w * (w * t).sin() + v0 * (w * t).cos();
        assert!((q - qr).abs() < 1e-14);
        assert!((v - vr).abs() < 1e-14);
    }

    #[test]
    fn derivative_identities() {
        // C'(t) = k S, S'(t) = C, D'(t) = S via central differences.
        let k = -7.3;
        let tau = 0.8;
        let h = 1e-6;
        let a = OscKernel::new(k, tau - h);
        let b = OscKernel::new(k, tau + h);
        let mid = OscKernel::new(k, tau);
        assert!(((b.c - a.c) / (2.0 * h) - k * mid.s).abs() < 1e-7);
        assert!(((b.s - a.s) / (2.0 * h) - mid.c).abs() < 1e-7);
        assert!(((b.d - a.d) / (2.0 * h) - mid.s).abs() < 1e-7);
    }
}
