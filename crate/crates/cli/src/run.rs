//! The `run` subcommand: closed-form trajectory tables, coupled
//! orientation tables, and the JSON run summary.

use std::path::PathBuf;

use sgi_core::contrast::{
    recombination_field_scale, recombination_field_scale_shorthand, rotational_contrast,
    spatial_contrast, spin_coherence_bound, RotationalContrastParams,
};
use sgi_core::dynamics::integrator::IntegratorOptions;
use sgi_core::dynamics::{idx, simulate_arm_streaming, DynamicsFlags};
use sgi_core::fields::TrapParams;
use sgi_core::stage::model_for;
use sgi_core::trajectory::{closure_residual, max_superposition, run_interferometer};
use sgi_core::wavepacket::evolve_stage;
use sgi_core::{Arm, Config, Error, ParticleSpec, Schedule};

use crate::manifest::effective_config;
use crate::outputs::{
    self, ContrastSummary, OverlapSummary, PacketArmSummary, PacketSummary, RecombinationSummary,
    ScheduleSummary, SeparationSummary, StageSummary, Summary, ValiditySummary,
};
use crate::{CliError, RunArgs};

/// Orientation tables are sampled this much finer than the trajectory
/// tables: the tilt librates near the body spin rate, far above any
/// translational frequency.
const ORIENTATION_SAMPLE_FACTOR: usize = 8;

struct Selection {
    fig2: bool,
    fig3: bool,
    fig4: bool,
    fig5: bool,
    fig6: bool,
}

fn selection(names: &[String]) -> Selection {
    let all = names.iter().any(|s| s == "all");
    let has = |n: &str| all || names.iter().any(|s| s == n);
    Selection {
        fig2: has("fig2"),
        fig3: has("fig3"),
        fig4: has("fig4"),
        fig5: has("fig5"),
        fig6: has("fig6"),
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    if args.samples_per_stage < 100 {
        return Err(Error::ConfigParse(format!(
            "--samples-per-stage must be at least 100, got {}",
            args.samples_per_stage
        ))
        .into());
    }
    let (cfg, source) = effective_config(&args.common)?;
    let mut lints = cfg.validate()?;
    let schedule = cfg.schedule()?;
    let particle = cfg.particle_spec();
    let trap = cfg.trap_params();
    let n = args.samples_per_stage;
    let want = selection(&args.outputs);
    std::fs::create_dir_all(&args.out)?;

    let mut written: Vec<PathBuf> = Vec::new();

    // Closed-form record; also feeds the per-stage validity summary.
    let record = run_interferometer(&schedule, &particle, &trap, n);

    if want.fig2 {
        let rows = (0..record.times.len()).map(|i| {
            vec![
                record.times[i],
                record.plus[i].x,
                record.plus[i].vx,
                record.minus[i].x,
                record.minus[i].vx,
                record.delta_x[i],
                record.delta_v[i],
            ]
        });
        written.push(outputs::write_csv(
            &args.out,
            "fig2.csv",
            "t_s,x_plus_m,vx_plus_m_per_s,x_minus_m,vx_minus_m_per_s,delta_x_m,delta_v_m_per_s",
            rows,
        )?);
    }

    if want.fig3 {
        // Transverse channel with and without the trap. It is identical
        // on both arms (the spin enters only the splitting direction),
        // so one column per trap setting suffices.
        let on = run_interferometer(
            &schedule,
            &particle,
            &TrapParams {
                enabled: true,
                ..trap
            },
            n,
        );
        let off = run_interferometer(
            &schedule,
            &particle,
            &TrapParams {
                enabled: false,
                ..trap
            },
            n,
        );
        let rows = (0..on.times.len()).map(|i| {
            vec![
                on.times[i],
                on.plus[i].y,
                on.plus[i].vy,
                off.plus[i].y,
                off.plus[i].vy,
            ]
        });
        written.push(outputs::write_csv(
            &args.out,
            "fig3.csv",
            "t_s,y_trap_on_m,vy_trap_on_m_per_s,y_trap_off_m,vy_trap_off_m_per_s",
            rows,
        )?);
    }

    let rotation_outputs = if want.fig4 || want.fig5 {
        if cfg.rotation.enabled {
            let rot_n = n * ORIENTATION_SAMPLE_FACTOR;
            let pair = coupled_pair(&schedule, &particle, &trap, rot_n)?;
            if want.fig4 {
                written.push(write_tilt_table(&args.out, "fig4.csv", &pair)?);
                let off = coupled_pair(
                    &schedule,
                    &particle,
                    &TrapParams {
                        enabled: false,
                        ..trap
                    },
                    rot_n,
                )?;
                written.push(write_tilt_table(&args.out, "fig4_notrap.csv", &off)?);
            }
            if want.fig5 {
                let rows = (0..pair.times.len()).map(|i| {
                    let da = pair.minus.alpha[i] - pair.plus.alpha[i];
                    let dg = pair.minus.gamma[i] - pair.plus.gamma[i];
                    vec![pair.times[i], da, dg, da + dg]
                });
                written.push(outputs::write_csv(
                    &args.out,
                    "fig5.csv",
                    "t_s,delta_alpha_rad,delta_gamma_rad,antisymmetry_sum_rad",
                    rows,
                )?);
            }
            "written".to_string()
        } else {
            "omitted: rotation disabled".to_string()
        }
    } else {
        "not selected".to_string()
    };

    if want.fig6 {
        written.push(crate::sweep::write_table(
            &cfg,
            &args.out,
            &crate::sweep::default_spin_rates(),
            crate::sweep::DEFAULT_OFFSETS,
            crate::sweep::DEFAULT_OCCUPATIONS,
        )?);
    }

    // ------------------------------------------------------------------
    // summary.json
    // ------------------------------------------------------------------
    let (dx_max, t_at_dx_max) = max_superposition(&schedule, &particle);
    let (res_dx, res_dv) = closure_residual(&schedule, &particle);

    let stages: Vec<StageSummary> = schedule
        .stages()
        .iter()
        .map(|s| {
            let freq = model_for(s.kind).frequencies(s, &particle, &trap);
            StageSummary {
                kind: model_for(s.kind).name().to_string(),
                b0_t: s.b0,
                eta: s.eta,
                tau_s: s.tau,
                omega_rad_per_s: freq.omega,
                k_x_per_s2: freq.k_x,
                k_y_per_s2: freq.k_y,
                spin_plus: s.spin_plus,
                spin_minus: s.spin_minus,
                drive_accel_plus_m_per_s2: freq.drive_accel(s.spin_plus),
                drive_accel_minus_m_per_s2: freq.drive_accel(s.spin_minus),
            }
        })
        .collect();

    let validity: Vec<ValiditySummary> = schedule
        .stages()
        .iter()
        .enumerate()
        .filter_map(|(k, s)| {
            let lo = 1 + k * n;
            let x_extent = record.plus[lo..lo + n]
                .iter()
                .chain(&record.minus[lo..lo + n])
                .map(|st| st.x.abs())
                .fold(0.0_f64, f64::max);
            model_for(s.kind)
                .validity(s, &particle, x_extent)
                .map(|rep| ValiditySummary {
                    stage_index: k + 1,
                    x_extent_m: rep.x_extent,
                    ratio: rep.ratio,
                    valid: rep.valid,
                })
        })
        .collect();

    let stage5 = schedule.stage(4);
    let field_scale = recombination_field_scale(
        stage5.b0,
        particle.beta0,
        stage5.eta,
        particle.y0,
        particle.nv_offset,
        particle.nv_angle,
    );
    let contrast_report = rotational_contrast(&RotationalContrastParams {
        delta_alpha: cfg.contrast.delta_alpha,
        delta_gamma: cfg.contrast.delta_gamma,
        sigma_p_alpha: cfg.contrast.sigma_p_alpha,
        sigma_p_gamma: cfg.contrast.sigma_p_gamma,
        n_thermal: cfg.contrast.n_thermal,
        omega0: particle.omega0,
        b_scale: field_scale,
        moment_of_inertia: particle.moment_of_inertia(),
        mu: particle.nv_moment(),
    });

    let wavepackets = match packet_summary(&cfg, &schedule, &particle, &trap) {
        Ok(p) => Some(p),
        Err(e) => {
            lints.push(format!("wavepacket summary unavailable: {e}"));
            None
        }
    };

    let summary = Summary {
        config_hash: outputs::sha256_hex(&cfg.to_toml_string()),
        config_source: source,
        advisory_lints: lints,
        schedule: ScheduleSummary {
            transition_times_s: schedule.transitions(),
            total_time_s: schedule.total_time(),
        },
        stages,
        separation: SeparationSummary {
            dx_max_m: dx_max,
            t_at_dx_max_s: t_at_dx_max,
            closure_residual_dx_m: res_dx,
            closure_residual_dv_m_per_s: res_dv,
        },
        validity,
        recombination: RecombinationSummary {
            field_scale_t: field_scale,
            field_scale_shorthand: recombination_field_scale_shorthand(
                stage5.b0,
                particle.beta0,
                particle.y0,
                particle.nv_offset,
                stage5.eta,
                particle.nv_angle,
            ),
            spin_coherence_bound: spin_coherence_bound(
                particle.nv_moment(),
                stage5.b0,
                particle.beta0,
                particle.moment_of_inertia(),
                particle.omega0,
            ),
            contrast: ContrastSummary {
                delta_alpha_rad: cfg.contrast.delta_alpha,
                delta_gamma_rad: cfg.contrast.delta_gamma,
                sigma_p_alpha_hbar: cfg.contrast.sigma_p_alpha,
                sigma_p_gamma_hbar: cfg.contrast.sigma_p_gamma,
                n_thermal: cfg.contrast.n_thermal,
                omega0_rad_per_s: particle.omega0,
                exp_alpha: contrast_report.exp_alpha,
                exp_gamma: contrast_report.exp_gamma,
                exp_thermal: contrast_report.exp_thermal,
                total_exponent: contrast_report.total_exponent,
                contrast: contrast_report.contrast,
            },
        },
        wavepackets,
        rotation_outputs,
        files_written: written
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let summary_path = outputs::write_json(&args.out, "summary.json", &summary)?;

    for path in written.iter().chain(std::iter::once(&summary_path)) {
        println!("wrote {}", path.display());
    }
    println!(
        "max separation {} m at t = {} s; closure residual ({} m, {} m/s)",
        outputs::fmt(dx_max),
        outputs::fmt(t_at_dx_max),
        outputs::fmt(res_dx),
        outputs::fmt(res_dv)
    );
    Ok(())
}

/// Orientation time series of one arm.
struct ArmSeries {
    beta: Vec<f64>,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
}

struct CoupledPair {
    times: Vec<f64>,
    plus: ArmSeries,
    minus: ArmSeries,
}

/// Runs the coupled model on both arms concurrently.
fn coupled_pair(
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
    samples_per_stage: usize,
) -> Result<CoupledPair, CliError> {
    let run_arm = |arm: Arm| -> Result<(Vec<f64>, ArmSeries), Error> {
        let mut times = Vec::new();
        let mut series = ArmSeries {
            beta: Vec::new(),
            alpha: Vec::new(),
            gamma: Vec::new(),
        };
        simulate_arm_streaming(
            schedule,
            particle,
            trap,
            &DynamicsFlags { rotation_on: true },
            &IntegratorOptions::default(),
            samples_per_stage,
            arm,
            &mut |t, s| {
                times.push(t);
                series.beta.push(s[idx::BETA]);
                series.alpha.push(s[idx::ALPHA]);
                series.gamma.push(s[idx::GAMMA]);
            },
        )?;
        Ok((times, series))
    };

    let (plus, minus) = std::thread::scope(|scope| {
        let hp = scope.spawn(|| run_arm(Arm::Plus));
        let hm = scope.spawn(|| run_arm(Arm::Minus));
        (
            hp.join().expect("plus-arm worker panicked"),
            hm.join().expect("minus-arm worker panicked"),
        )
    });
    let (times, plus) = plus?;
    let (_, minus) = minus?;
    Ok(CoupledPair { times, plus, minus })
}

fn write_tilt_table(
    dir: &std::path::Path,
    name: &str,
    pair: &CoupledPair,
) -> Result<PathBuf, CliError> {
    let rows = (0..pair.times.len())
        .map(|i| vec![pair.times[i], pair.plus.beta[i], pair.minus.beta[i]]);
    outputs::write_csv(dir, name, "t_s,beta_plus_rad,beta_minus_rad", rows)
}

/// Evolves the initial packet through all five stages on each arm and
/// reports the final widths, centers, and overlap.
fn packet_summary(
    cfg: &Config,
    schedule: &Schedule,
    particle: &ParticleSpec,
    trap: &TrapParams,
) -> Result<PacketSummary, Error> {
    let start = cfg.initial_packet()?;
    let mut plus = start;
    let mut minus = start;
    for s in schedule.stages() {
        let freq = model_for(s.kind).frequencies(s, particle, trap);
        plus = evolve_stage(
            &plus,
            freq.k_x,
            freq.drive_accel(s.spin_plus),
            s.tau,
            particle.mass,
        )?;
        minus = evolve_stage(
            &minus,
            freq.k_x,
            freq.drive_accel(s.spin_minus),
            s.tau,
            particle.mass,
        )?;
    }
    let overlap = spatial_contrast(&plus, &minus)?;
    Ok(PacketSummary {
        sigma_t5_m: plus.sigma,
        plus: PacketArmSummary {
            center_m: plus.x_c,
            mean_velocity_m_per_s: plus.mean_velocity(particle.mass),
        },
        minus: PacketArmSummary {
            center_m: minus.x_c,
            mean_velocity_m_per_s: minus.mean_velocity(particle.mass),
        },
        overlap: OverlapSummary {
            contrast: overlap.contrast,
            log_contrast: overlap.log_contrast,
            exp_separation: overlap.exp_separation,
            exp_momentum: overlap.exp_momentum,
            phase_rad: overlap.phase,
        },
    })
}
