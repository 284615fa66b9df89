//! Explicit Runge-Kutta integration: adaptive Dormand-Prince 5(4) with
//! free 4th-order dense output (the default), and a fixed-step classical
//! RK4 as an independent cross-check variant.
//!
//! The right-hand side is fallible so that model-level guards (e.g.
//! coordinate singularities) abort the integration with a typed error.

use crate::error::{Error, Result};

/// Right-hand side of y' = f(t, y).
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<()>;
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]) -> Result<()>,
{
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) -> Result<()> {
        self(t, y, dy)
    }
}

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive 5(4) pair with step-size control and dense output.
    DormandPrince54,
    /// Classical 4th-order Runge-Kutta with a fixed step (capped by the
    /// distance to the next requested sample).
    RungeKutta4 { step: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    /// Initial trial step; a heuristic fraction of the span if `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::DormandPrince54,
            rtol: 1e-10,
            atol: 1e-13,
            h0: None,
            max_steps: 50_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// b - bhat, for the embedded error estimate.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output coefficients of the 4th-order interpolant.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates y' = f(t, y) from `t0` to `t1` (t1 > t0), invoking
/// `on_sample` at every requested time in `sample_times` (which must be
/// ascending and lie within [t0, t1]). Returns the state at `t1`.
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &IntegratorOptions,
    sample_times: &[f64],
    on_sample: &mut dyn FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    debug_assert!(t1 > t0);
    debug_assert!(sample_times.windows(2).all(|w| w[1] >= w[0]));
    match opts.method {
        Method::DormandPrince54 => dp54(sys, t0, t1, y0, opts, sample_times, on_sample),
        Method::RungeKutta4 { step } => rk4(sys, t0, t1, y0, step, sample_times, on_sample),
    }
}

fn check_finite<const N: usize>(t: f64, v: &[f64; N]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteDerivative { t })
    }
}

#[allow(clippy::too_many_arguments)]
fn dp54<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &IntegratorOptions,
    sample_times: &[f64],
    on_sample: &mut dyn FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    let mut t = t0;
    let mut y = y0;
    let mut next_sample = 0;
    // Samples at or before the start get the initial state.
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }

    let mut k1 = [0.0; N];
    sys.rhs(t, &y, &mut k1)?;
    check_finite(t, &k1)?;
    let mut h = opts.h0.unwrap_or((t1 - t0) * 1e-4).min(t1 - t0);

    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];
    let mut ytmp = [0.0; N];

    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        steps += 1;
        if t + h > t1 {
            h = t1 - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        for i in 0..N {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &ytmp, &mut k2)?;
        for i in 0..N {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &ytmp, &mut k3)?;
        for i in 0..N {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &ytmp, &mut k4)?;
        for i in 0..N {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &ytmp, &mut k5)?;
        for i in 0..N {
            ytmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(t + h, &ytmp, &mut k6)?;
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        sys.rhs(t + h, &y1, &mut k7)?;
        check_finite(t + h, &y1)?;
        check_finite(t + h, &k7)?;

        // Scaled max-norm error estimate.
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                    + E7 * k7[i]);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err = err.max((e / scale).abs());
        }

        if err <= 1.0 {
            // Accepted: dense output over [t, t+h], then advance (FSAL).
            if next_sample < sample_times.len() && sample_times[next_sample] <= t + h {
                let mut rc3 = [0.0; N];
                let mut rc4 = [0.0; N];
                let mut rc5 = [0.0; N];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    rc3[i] = h * k1[i] - dy;
                    rc4[i] = dy - h * k7[i] - rc3[i];
                    rc5[i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                while next_sample < sample_times.len() && sample_times[next_sample] <= t + h {
                    let ts = sample_times[next_sample];
                    let theta = ((ts - t) / h).clamp(0.0, 1.0);
                    let mut u = [0.0; N];
                    for i in 0..N {
                        let dy = y1[i] - y[i];
                        u[i] = y[i]
                            + theta
                                * (dy + (1.0 - theta)
                                    * (rc3[i] + theta * (rc4[i] + (1.0 - theta) * rc5[i])));
                    }
                    on_sample(ts, &u);
                    next_sample += 1;
                }
            }
            t += h;
            y = y1;
            k1 = k7;
            let factor = if err == 0.0 {
                10.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    // Samples that coincide with t1 up to rounding.
    while next_sample < sample_times.len() {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok(y)
}

fn rk4_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N]> {
    let mut k1 = [0.0; N];
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut tmp = [0.0; N];
    sys.rhs(t, y, &mut k1)?;
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k2)?;
    for i in 0..N {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    sys.rhs(t + 0.5 * h, &tmp, &mut k3)?;
    for i in 0..N {
        tmp[i] = y[i] + h * k3[i];
    }
    sys.rhs(t + h, &tmp, &mut k4)?;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(t + h, &out)?;
    Ok(out)
}

fn rk4<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    step: f64,
    sample_times: &[f64],
    on_sample: &mut dyn FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::StepSizeUnderflow { t: t0, h: step });
    }
    let mut t = t0;
    let mut y = y0;
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    // March from knot to knot (sample times, then t1) with an integer
    // number of equal sub-steps no larger than `step`.
    let mut knots: Vec<f64> = sample_times
        .iter()
        .copied()
        .filter(|&ts| ts > t0 && ts < t1)
        .collect();
    knots.push(t1);
    for knot in knots {
        let span = knot - t;
        if span > 0.0 {
            let n = (span / step).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                y = rk4_step(sys, t, &y, h)?;
                t += h;
            }
            t = knot;
        }
        while next_sample < sample_times.len() && sample_times[next_sample] <= t {
            on_sample(sample_times[next_sample], &y);
            next_sample += 1;
        }
    }
    while next_sample < sample_times.len() {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok(y)
}
