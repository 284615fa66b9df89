//! The `tune` subcommand: adjust the closing stage until the two arms
//! rejoin in position and velocity, then write the tuned configuration
//! and a residual report.

use serde::Serialize;
use sgi_core::trajectory::{tune_closure, TuneOptions};
use sgi_core::Error;

use crate::manifest::effective_config;
use crate::outputs;
use crate::{CliError, TuneArgs};

#[derive(Serialize)]
struct TuneSummary {
    config_hash_before: String,
    config_hash_after: String,
    iterations: usize,
    changed: bool,
    eta5: f64,
    tau5_s: f64,
    residual_dx_m: f64,
    residual_dv_m_per_s: f64,
}

pub fn cmd_tune(args: &TuneArgs) -> Result<(), CliError> {
    if args.max_iterations == 0 {
        return Err(Error::ConfigParse("--max-iterations must be at least 1".into()).into());
    }
    let bad_dx = !args.tol_dx.is_finite() || args.tol_dx <= 0.0;
    let bad_dv = !args.tol_dv.is_finite() || args.tol_dv <= 0.0;
    if bad_dx || bad_dv {
        return Err(Error::ConfigParse(format!(
            "tolerances must be positive, got --tol-dx {} --tol-dv {}",
            args.tol_dx, args.tol_dv
        ))
        .into());
    }
    let (cfg, _source) = effective_config(&args.common)?;
    cfg.validate()?;
    let schedule = cfg.schedule()?;
    let particle = cfg.particle_spec();
    std::fs::create_dir_all(&args.out)?;

    let opts = TuneOptions {
        tol_dx: args.tol_dx,
        tol_dv: args.tol_dv,
        max_iters: args.max_iterations,
    };
    let (_tuned_schedule, report) = tune_closure(&schedule, &particle, &opts)?;

    let mut tuned_cfg = cfg.clone();
    tuned_cfg.stage[4].eta = report.eta5;
    tuned_cfg.stage[4].tau = report.tau5;

    let summary = TuneSummary {
        config_hash_before: outputs::sha256_hex(&cfg.to_toml_string()),
        config_hash_after: outputs::sha256_hex(&tuned_cfg.to_toml_string()),
        iterations: report.iterations,
        changed: tuned_cfg != cfg,
        eta5: report.eta5,
        tau5_s: report.tau5,
        residual_dx_m: report.residual_dx,
        residual_dv_m_per_s: report.residual_dv,
    };

    let config_path = args.out.join("tuned_config.toml");
    std::fs::write(&config_path, tuned_cfg.to_toml_string())?;
    let report_path = outputs::write_json(&args.out, "tune_report.json", &summary)?;

    println!("wrote {}", config_path.display());
    println!("wrote {}", report_path.display());
    println!(
        "closing stage: eta = {}, tau = {} s after {} iterations; residuals ({} m, {} m/s)",
        outputs::fmt(report.eta5),
        outputs::fmt(report.tau5),
        report.iterations,
        outputs::fmt(report.residual_dx),
        outputs::fmt(report.residual_dv)
    );
    Ok(())
}
