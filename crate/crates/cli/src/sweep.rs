//! The `sweep` subcommand: orientation-contrast table over a grid of
//! body spin rate x spin-site offset x thermal occupation.

use std::path::{Path, PathBuf};

use sgi_core::contrast::{contrast_sweep, ContrastSweepSettings};
use sgi_core::{Config, Error};

use crate::manifest::effective_config;
use crate::outputs;
use crate::{CliError, SweepArgs};

pub const DEFAULT_OFFSETS: &[f64] = &[0.0, 5e-9, 1e-8];
pub const DEFAULT_OCCUPATIONS: &[f64] = &[0.0, 5.0, 20.0];

/// 41 logarithmically spaced spin rates from the reference value up to
/// the fast-spin regime where the thermal term is negligible.
pub fn default_spin_rates() -> Vec<f64> {
    log_spaced(2.0 * std::f64::consts::PI * 1.0e4, 1.0e8, 41)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let bad_min = !args.omega0_min.is_finite() || args.omega0_min <= 0.0;
    let bad_max = !args.omega0_max.is_finite() || args.omega0_max < args.omega0_min;
    if bad_min || bad_max {
        return Err(Error::ConfigParse(format!(
            "spin-rate range must satisfy 0 < min <= max, got [{}, {}]",
            args.omega0_min, args.omega0_max
        ))
        .into());
    }
    if args.omega0_points == 0 {
        return Err(Error::ConfigParse("--omega0-points must be at least 1".into()).into());
    }
    if args.offsets.is_empty() {
        return Err(Error::ConfigParse("--offsets must not be empty".into()).into());
    }
    if args.n_list.is_empty() {
        return Err(Error::ConfigParse("--n-list must not be empty".into()).into());
    }
    if let Some(bad) = args.n_list.iter().find(|n| **n < 0.0) {
        return Err(Error::ConfigParse(format!(
            "occupation numbers must be non-negative, got {bad}"
        ))
        .into());
    }

    let (cfg, _source) = effective_config(&args.common)?;
    cfg.validate()?;
    std::fs::create_dir_all(&args.out)?;
    let rates = log_spaced(args.omega0_min, args.omega0_max, args.omega0_points);
    let path = write_table(&cfg, &args.out, &rates, &args.offsets, &args.n_list)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Evaluates the contrast grid for the given configuration and writes
/// `fig6.csv`. Fixed inputs (mismatch angles, momentum spreads, closing
/// stage, rotor constants) come from the configuration.
pub fn write_table(
    cfg: &Config,
    dir: &Path,
    spin_rates: &[f64],
    offsets: &[f64],
    occupations: &[f64],
) -> Result<PathBuf, CliError> {
    let schedule = cfg.schedule()?;
    let particle = cfg.particle_spec();
    let stage5 = schedule.stage(4);
    let fixed = ContrastSweepSettings {
        delta_alpha: cfg.contrast.delta_alpha,
        delta_gamma: cfg.contrast.delta_gamma,
        sigma_p_alpha: cfg.contrast.sigma_p_alpha,
        sigma_p_gamma: cfg.contrast.sigma_p_gamma,
        b0: stage5.b0,
        beta0: particle.beta0,
        eta5: stage5.eta,
        y0: particle.y0,
        nv_angle: particle.nv_angle,
        moment_of_inertia: particle.moment_of_inertia(),
        mu: particle.nv_moment(),
    };
    let rows = contrast_sweep(spin_rates, offsets, occupations, &fixed);
    outputs::write_csv(
        dir,
        "fig6.csv",
        "omega0_rad_per_s,nv_offset_m,n_occupation,contrast,exp_alpha,exp_gamma,exp_thermal",
        rows.iter().map(|r| {
            vec![
                r.omega0,
                r.nv_offset,
                r.n_thermal,
                r.report.contrast,
                r.report.exp_alpha,
                r.report.exp_gamma,
                r.report.exp_thermal,
            ]
        }),
    )
}
