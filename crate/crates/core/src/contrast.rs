//! Interference contrast: the spatial overlap of the two recombined
//! packets and the orientation-channel (spin-coherence) attenuation
//! factors.

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::wavepacket::PacketState;

/// Overlap magnitude and phase of two equal-width Gaussian packets.
///
/// For shared sigma and shared quadratic phase a (both hold by
/// construction when the two arms traverse the same stage curvatures),
/// <L|R> = C exp(i phi) with
///
/// ```text
///     C   = exp[ -(xR-xL)^2/(8 sigma^2) - sigma^2 (bR-bL)^2 / 2 ]
///     phi = (bR - bL)(xL + xR)/2 + (cR - cL)
/// ```
#[derive(Debug, Clone, Copy)]
pub struct OverlapContrast {
    pub contrast: f64,
    /// ln C = -(separation + momentum) exponents; finite even when the
    /// contrast itself underflows.
    pub log_contrast: f64,
    pub exp_separation: f64,
    pub exp_momentum: f64,
    /// Overlap phase wrapped to (-pi, pi].
    pub phase: f64,
    /// Unwrapped overlap phase; dominated by the macroscopic action
    /// difference and only meaningful modulo 2 pi at full scale.
    pub phase_raw: f64,
}

/// Relative width mismatch beyond which the shared-envelope overlap
/// formula is refused.
const WIDTH_MATCH_TOL: f64 = 1e-9;

pub fn spatial_contrast(left: &PacketState, right: &PacketState) -> Result<OverlapContrast> {
    let sig = left.sigma.max(right.sigma);
    if (left.sigma - right.sigma).abs() > WIDTH_MATCH_TOL * sig {
        return Err(Error::WidthMismatch {
            sigma_left: left.sigma,
            sigma_right: right.sigma,
        });
    }
    debug_assert!(
        (left.a - right.a).abs() <= 1e-6 * left.a.abs().max(right.a.abs()).max(1.0),
        "quadratic phases diverged between arms"
    );
    let sigma2 = left.sigma * right.sigma;
    let dx = right.x_c - left.x_c;
    let db = right.b - left.b;
    let exp_separation = dx * dx / (8.0 * sigma2);
    let exp_momentum = sigma2 * db * db / 2.0;
    let log_contrast = -(exp_separation + exp_momentum);
    let phase_raw = db * (left.x_c + right.x_c) / 2.0 + (right.c - left.c);
    let phase = wrap_angle(phase_raw);
    Ok(OverlapContrast {
        contrast: log_contrast.exp(),
        log_contrast,
        exp_separation,
        exp_momentum,
        phase,
        phase_raw,
    })
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = x % two_pi;
    if r > std::f64::consts::PI {
        r -= two_pi;
    } else if r <= -std::f64::consts::PI {
        r += two_pi;
    }
    r
}

/// Effective field scale at recombination that the spin coherence is
/// exposed to: bias tilt + trap offset across the gradient + spin-site
/// offset, all in tesla:
///
/// ```text
///     B_eff = B0 beta0 + eta5 y0 + d eta5 sin(nv_angle)
/// ```
pub fn recombination_field_scale(
    b0: f64,
    beta0: f64,
    eta5: f64,
    y0: f64,
    nv_offset: f64,
    nv_angle: f64,
) -> f64 {
    b0 * beta0 + eta5 * y0 + nv_offset * eta5 * nv_angle.sin()
}

/// The abbreviated form of the same scale as it is usually quoted
/// (mixing a raw length with field terms); kept for comparison output
/// only — dimensionally inconsistent, do not use in formulas.
pub fn recombination_field_scale_shorthand(
    b0: f64,
    beta0: f64,
    y0: f64,
    nv_offset: f64,
    eta: f64,
    nv_angle: f64,
) -> f64 {
    b0 * beta0 - y0 + nv_offset * eta * nv_angle.sin()
}

/// Inputs of the orientation-channel contrast estimate.
#[derive(Debug, Clone, Copy)]
pub struct RotationalContrastParams {
    /// Accumulated precession-angle difference between arms [rad].
    pub delta_alpha: f64,
    /// Accumulated body-angle difference between arms [rad].
    pub delta_gamma: f64,
    /// Initial momentum spreads conjugate to alpha/gamma, in units of
    /// hbar (dimensionless multipliers).
    pub sigma_p_alpha: f64,
    pub sigma_p_gamma: f64,
    /// Thermal occupation of the tilt libration mode.
    pub n_thermal: f64,
    /// Body spin rate [rad/s].
    pub omega0: f64,
    /// Effective recombination field scale [T].
    pub b_scale: f64,
    /// Moment of inertia [kg m^2].
    pub moment_of_inertia: f64,
    /// Magnetic moment [J/T].
    pub mu: f64,
}

/// Multiplicative attenuation factors of the orientation channel:
///
/// ```text
///     C = exp[ -(d_alpha s_pa)^2/2 - (d_gamma s_pg)^2/2
///              - 16 (1 + 2n) mu^2 B^2 / (hbar I Omega0^3) ]
/// ```
#[derive(Debug, Clone, Copy)]
pub struct RotationalContrast {
    pub exp_alpha: f64,
    pub exp_gamma: f64,
    pub exp_thermal: f64,
    pub total_exponent: f64,
    pub contrast: f64,
}

pub fn rotational_contrast(p: &RotationalContrastParams) -> RotationalContrast {
    let exp_alpha = (p.delta_alpha * p.sigma_p_alpha).powi(2) / 2.0;
    let exp_gamma = (p.delta_gamma * p.sigma_p_gamma).powi(2) / 2.0;
    let exp_thermal = 16.0 * (1.0 + 2.0 * p.n_thermal) * p.mu * p.mu * p.b_scale * p.b_scale
        / (HBAR * p.moment_of_inertia * p.omega0.powi(3));
    let total_exponent = exp_alpha + exp_gamma + exp_thermal;
    RotationalContrast {
        exp_alpha,
        exp_gamma,
        exp_thermal,
        total_exponent,
        contrast: (-total_exponent).exp(),
    }
}

/// Fixed inputs of a contrast sweep: everything except the swept spin
/// rate, spin-site offset, and thermal occupation. The recombination
/// field scale is recomputed per offset.
#[derive(Debug, Clone, Copy)]
pub struct ContrastSweepSettings {
    pub delta_alpha: f64,
    pub delta_gamma: f64,
    pub sigma_p_alpha: f64,
    pub sigma_p_gamma: f64,
    /// Bias field of the closing stage [T].
    pub b0: f64,
    /// Initial tilt [rad].
    pub beta0: f64,
    /// Gradient of the closing stage [T/m].
    pub eta5: f64,
    /// Transverse equilibrium offset [m].
    pub y0: f64,
    /// Angle of the spin site off the body axis [rad].
    pub nv_angle: f64,
    pub moment_of_inertia: f64,
    pub mu: f64,
}

/// One row of a contrast sweep.
#[derive(Debug, Clone, Copy)]
pub struct ContrastSweepPoint {
    pub omega0: f64,
    pub nv_offset: f64,
    pub n_thermal: f64,
    /// Recombination field scale used for this row [T].
    pub b_scale: f64,
    pub report: RotationalContrast,
}

/// Grid evaluation of [`rotational_contrast`] over spin rate x spin-site
/// offset x occupation. Row order is deterministic regardless of thread
/// scheduling: offsets outermost, then occupations, then spin rates, each
/// in the order given. Points are evaluated concurrently.
pub fn contrast_sweep(
    spin_rates: &[f64],
    nv_offsets: &[f64],
    occupations: &[f64],
    fixed: &ContrastSweepSettings,
) -> Vec<ContrastSweepPoint> {
    let total = spin_rates.len() * nv_offsets.len() * occupations.len();
    let point = |flat: usize| -> ContrastSweepPoint {
        let omega0 = spin_rates[flat % spin_rates.len()];
        let rest = flat / spin_rates.len();
        let n_thermal = occupations[rest % occupations.len()];
        let nv_offset = nv_offsets[rest / occupations.len()];
        let b_scale = recombination_field_scale(
            fixed.b0,
            fixed.beta0,
            fixed.eta5,
            fixed.y0,
            nv_offset,
            fixed.nv_angle,
        );
        let report = rotational_contrast(&RotationalContrastParams {
            delta_alpha: fixed.delta_alpha,
            delta_gamma: fixed.delta_gamma,
            sigma_p_alpha: fixed.sigma_p_alpha,
            sigma_p_gamma: fixed.sigma_p_gamma,
            n_thermal,
            omega0,
            b_scale,
            moment_of_inertia: fixed.moment_of_inertia,
            mu: fixed.mu,
        });
        ContrastSweepPoint {
            omega0,
            nv_offset,
            n_thermal,
            b_scale,
            report,
        }
    };

    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    if threads <= 1 || total < 64 {
        return (0..total).map(point).collect();
    }
    let chunk = total.div_ceil(threads);
    let point = &point;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..total.div_ceil(chunk))
            .map(|t| {
                let lo = t * chunk;
                let hi = (lo + chunk).min(total);
                s.spawn(move || (lo..hi).map(point).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

/// Dimensionless bound on the spin-axis wobble transferred to the spin
/// coherence during recombination:
///
/// ```text
///     kappa = sqrt(I Omega0 / 2 hbar) * 3 mu B0 beta0 / (I Omega0^2)
/// ```
pub fn spin_coherence_bound(
    mu: f64,
    b0: f64,
    beta0: f64,
    moment_of_inertia: f64,
    omega0: f64,
) -> f64 {
    (moment_of_inertia * omega0 / (2.0 * HBAR)).sqrt() * 3.0 * mu * b0 * beta0
        / (moment_of_inertia * omega0 * omega0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PLANCK;
    use approx::assert_relative_eq;

    #[test]
    fn identical_packets_have_unit_contrast_and_zero_phase() {
        let p = PacketState {
            sigma: 2e-11,
            x_c: 5e-9,
            a: 1e16,
            b: 3e8,
            c: 1.2,
        };
        let o = spatial_contrast(&p, &p).unwrap();
        assert_eq!(o.contrast, 1.0);
        assert_eq!(o.phase, 0.0);
    }

    #[test]
    fn separation_exponent_reference_point() {
        // Displacement 2 sqrt(2) sigma gives exactly exp(-1).
        let sigma = 2e-11;
        let l = PacketState::ground(sigma, 0.0);
        let r = PacketState::ground(sigma, 2.0 * std::f64::consts::SQRT_2 * sigma);
        let o = spatial_contrast(&l, &r).unwrap();
        assert_relative_eq!(o.exp_separation, 1.0, max_relative = 1e-12);
        assert_relative_eq!(o.contrast, (-1.0_f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn momentum_exponent_and_phase() {
        let sigma = 2e-11;
        let db = 1.0 / sigma; // exponent sigma^2 db^2/2 = 1/2
        let l = PacketState {
            sigma,
            x_c: 1e-9,
            a: 0.0,
            b: 0.0,
            c: 0.2,
        };
        let r = PacketState {
            sigma,
            x_c: 1e-9,
            a: 0.0,
            b: db,
            c: 0.5,
        };
        let o = spatial_contrast(&l, &r).unwrap();
        assert_relative_eq!(o.exp_momentum, 0.5, max_relative = 1e-12);
        assert_relative_eq!(o.phase_raw, db * 1e-9 + 0.3, max_relative = 1e-12);
    }

    #[test]
    fn width_mismatch_is_refused() {
        let l = PacketState::ground(2e-11, 0.0);
        let r = PacketState::ground(2.1e-11, 0.0);
        assert!(matches!(
            spatial_contrast(&l, &r),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn recombination_field_scale_reference_value() {
        let b = recombination_field_scale(
            0.001,
            0.01,
            4460.0,
            1.1e-6,
            1e-8,
            std::f64::consts::FRAC_PI_6,
        );
        assert_relative_eq!(b, 0.0049383000000000005, epsilon = 0.0, max_relative = 1e-13);
    }

    fn reference_params() -> RotationalContrastParams {
        RotationalContrastParams {
            delta_alpha: 0.1,
            delta_gamma: 0.1,
            sigma_p_alpha: 5.0,
            sigma_p_gamma: 5.0,
            n_thermal: 20.0,
            omega0: 2.0 * std::f64::consts::PI * 1.0e4,
            b_scale: 0.0049383000000000005,
            moment_of_inertia: 0.4 * 1e-15 * 4.0858e-7 * 4.0858e-7,
            mu: PLANCK * 2.8e10,
        }
    }

    #[test]
    fn rotational_contrast_reference_values() {
        let r = rotational_contrast(&reference_params());
        assert_relative_eq!(r.exp_alpha, 0.125, max_relative = 1e-12);
        assert_relative_eq!(r.exp_gamma, 0.125, max_relative = 1e-12);
        assert_relative_eq!(r.exp_thermal, 3.1525133512467316, max_relative = 1e-9);
        assert_relative_eq!(
            r.contrast,
            (-(0.25 + 3.1525133512467316_f64)).exp(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn fast_spin_suppresses_thermal_dephasing() {
        let mut p = reference_params();
        p.omega0 = 1e8;
        let r = rotational_contrast(&p);
        assert_relative_eq!(r.exp_thermal, 7.81981609656763e-10, max_relative = 1e-9);
        assert_relative_eq!(r.contrast, (-0.25_f64).exp(), max_relative = 1e-6);
    }

    #[test]
    fn contrast_monotonic_in_spin_rate_and_occupation() {
        let base = reference_params();
        let mut prev = 0.0;
        for omega0 in [1e4, 3e4, 1e5, 1e6, 1e8] {
            let c = rotational_contrast(&RotationalContrastParams { omega0, ..base }).contrast;
            assert!(c >= prev, "contrast not increasing at omega0={omega0}");
            prev = c;
        }
        let mut prev = 1.0;
        for n in [0.0, 5.0, 20.0, 100.0] {
            let c = rotational_contrast(&RotationalContrastParams {
                n_thermal: n,
                ..base
            })
            .contrast;
            assert!(c <= prev, "contrast not decreasing at n={n}");
            prev = c;
        }
    }

    fn reference_sweep_settings() -> ContrastSweepSettings {
        ContrastSweepSettings {
            delta_alpha: 0.1,
            delta_gamma: 0.1,
            sigma_p_alpha: 5.0,
            sigma_p_gamma: 5.0,
            b0: 0.001,
            beta0: 0.01,
            eta5: 4460.0,
            y0: 1.1e-6,
            nv_angle: std::f64::consts::FRAC_PI_6,
            moment_of_inertia: 0.4 * 1e-15 * 4.0858e-7 * 4.0858e-7,
            mu: PLANCK * 2.8e10,
        }
    }

    #[test]
    fn sweep_rows_match_direct_evaluation_in_declared_order() {
        let fixed = reference_sweep_settings();
        let rates = [6.0e4, 1.0e5, 1.0e6];
        let offsets = [0.0, 1e-8];
        let occs = [0.0, 20.0];
        let rows = contrast_sweep(&rates, &offsets, &occs, &fixed);
        assert_eq!(rows.len(), 12);
        for (id, &d) in offsets.iter().enumerate() {
            for (in_, &n) in occs.iter().enumerate() {
                for (iw, &w) in rates.iter().enumerate() {
                    let row = &rows[(id * occs.len() + in_) * rates.len() + iw];
                    assert_eq!(row.omega0, w);
                    assert_eq!(row.nv_offset, d);
                    assert_eq!(row.n_thermal, n);
                    let b = recombination_field_scale(
                        fixed.b0,
                        fixed.beta0,
                        fixed.eta5,
                        fixed.y0,
                        d,
                        fixed.nv_angle,
                    );
                    assert_eq!(row.b_scale, b);
                    let direct = rotational_contrast(&RotationalContrastParams {
                        delta_alpha: fixed.delta_alpha,
                        delta_gamma: fixed.delta_gamma,
                        sigma_p_alpha: fixed.sigma_p_alpha,
                        sigma_p_gamma: fixed.sigma_p_gamma,
                        n_thermal: n,
                        omega0: w,
                        b_scale: b,
                        moment_of_inertia: fixed.moment_of_inertia,
                        mu: fixed.mu,
                    });
                    assert_eq!(row.report.contrast, direct.contrast);
                    assert_eq!(row.report.total_exponent, direct.total_exponent);
                }
            }
        }
    }

    #[test]
    fn sweep_is_monotone_in_each_swept_variable() {
        let fixed = reference_sweep_settings();
        // > 64 points so the concurrent dispatch path is the one tested.
        let rates: Vec<f64> = (0..12)
            .map(|i| 6.2832e4 * (1e8 / 6.2832e4_f64).powf(i as f64 / 11.0))
            .collect();
        let offsets = [0.0, 5e-9, 1e-8];
        let occs = [0.0, 5.0, 20.0];
        let rows = contrast_sweep(&rates, &offsets, &occs, &fixed);
        assert_eq!(rows.len(), rates.len() * offsets.len() * occs.len());

        let at = |id: usize, in_: usize, iw: usize| {
            rows[(id * occs.len() + in_) * rates.len() + iw].report.contrast
        };
        for id in 0..offsets.len() {
            for in_ in 0..occs.len() {
                for iw in 1..rates.len() {
                    assert!(at(id, in_, iw) >= at(id, in_, iw - 1));
                }
                if in_ > 0 {
                    for iw in 0..rates.len() {
                        assert!(at(id, in_, iw) <= at(id, in_ - 1, iw));
                    }
                }
            }
        }
        // Offset monotonicity only holds when every field-scale term has
        // the same sign; verify that before asserting it.
        let terms_share_sign = fixed.b0 * fixed.beta0 > 0.0
            && fixed.eta5 * fixed.y0 > 0.0
            && offsets
                .iter()
                .all(|d| d * fixed.eta5 * fixed.nv_angle.sin() >= 0.0);
        assert!(terms_share_sign);
        for id in 1..offsets.len() {
            for in_ in 0..occs.len() {
                for iw in 0..rates.len() {
                    assert!(at(id, in_, iw) <= at(id - 1, in_, iw));
                }
            }
        }
    }

    #[test]
    fn spin_coherence_bound_reference_value() {
        let i_m = 0.4 * 1e-15 * 4.0858e-7 * 4.0858e-7;
        let kappa = spin_coherence_bound(
            PLANCK * 2.8e10,
            0.001,
            0.01,
            i_m,
            2.0 * std::f64::consts::PI * 1.0e4,
        );
        assert_relative_eq!(kappa, 2.977867259240534e-4, epsilon = 0.0, max_relative = 1e-9);
    }
}
