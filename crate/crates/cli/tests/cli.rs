//! End-to-end tests for the `sgi` binary: every subcommand is exercised
//! through a real process spawn, and the output files are parsed back to
//! check the published interface (file set, CSV headers, JSON schema,
//! exit codes, and byte-level determinism).

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sgi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgi"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = sgi().args(args).output().expect("spawn sgi");
    assert!(
        out.status.success(),
        "expected success for {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    let out = sgi().args(args).output().expect("spawn sgi");
    out.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .map(|v| v.parse::<f64>().expect("numeric cell"))
                .collect()
        })
        .collect()
}

#[test]
fn run_writes_the_published_file_set_and_summary() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().to_str().expect("utf-8 path");
    run_ok(&[
        "run",
        "--preset",
        "table1",
        "--out",
        out,
        "--samples-per-stage",
        "150",
    ]);

    for name in [
        "fig2.csv",
        "fig3.csv",
        "fig4.csv",
        "fig4_notrap.csv",
        "fig5.csv",
        "summary.json",
    ] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }

    let summary: Value = serde_json::from_str(&read(dir.path(), "summary.json")).expect("json");

    let hash = summary["config_hash"].as_str().expect("config_hash");
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(summary["config_source"], "preset:table1");

    // Headline number of the contract example: the maximal arm separation
    // must land in the advertised micron window.
    let dx_max = summary["separation"]["dx_max_m"].as_f64().expect("dx_max");
    assert!((5e-6..=2e-5).contains(&dx_max), "dx_max = {dx_max}");

    let transitions = summary["schedule"]["transition_times_s"]
        .as_array()
        .expect("transition times");
    assert_eq!(transitions.len(), 5);
    let total = summary["schedule"]["total_time_s"].as_f64().expect("total");
    assert_eq!(transitions[4].as_f64().expect("t5"), total);

    // Derived stage frequencies are part of the summary schema.
    let stages = summary["stages"].as_array().expect("stages");
    assert_eq!(stages.len(), 5);
    for s in stages {
        assert!(s["omega_rad_per_s"].as_f64().expect("omega") > 0.0);
    }

    assert_eq!(summary["rotation_outputs"], "written");

    // CSV shape: header plus 1 + 5 n rows, time column starts at zero and
    // is strictly increasing.
    let fig2 = read(dir.path(), "fig2.csv");
    assert!(fig2.starts_with("t_s,x_plus_m,vx_plus_m_per_s,x_minus_m,vx_minus_m_per_s,"));
    let rows = csv_rows(&fig2);
    assert_eq!(rows.len(), 1 + 5 * 150);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
}

#[test]
fn run_is_byte_identical_across_reruns() {
    let dir_a = tempfile::tempdir().expect("tempdir");
    let dir_b = tempfile::tempdir().expect("tempdir");
    for dir in [&dir_a, &dir_b] {
        run_ok(&[
            "run",
            "--preset",
            "table1",
            "--out",
            dir.path().to_str().expect("utf-8"),
            "--samples-per-stage",
            "120",
            "--outputs",
            "fig2,fig3",
        ]);
    }
    for name in ["fig2.csv", "fig3.csv", "summary.json"] {
        let a = std::fs::read(dir_a.path().join(name)).expect("read a");
        let b = std::fs::read(dir_b.path().join(name)).expect("read b");
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn run_without_rotation_omits_orientation_tables() {
    let dir = tempfile::tempdir().expect("tempdir");
    run_ok(&[
        "run",
        "--preset",
        "table1",
        "--out",
        dir.path().to_str().expect("utf-8"),
        "--samples-per-stage",
        "120",
        "--rotation_on=false",
    ]);
    assert!(dir.path().join("fig2.csv").is_file());
    assert!(dir.path().join("fig3.csv").is_file());
    assert!(!dir.path().join("fig4.csv").exists());
    assert!(!dir.path().join("fig4_notrap.csv").exists());
    assert!(!dir.path().join("fig5.csv").exists());

    let summary: Value = serde_json::from_str(&read(dir.path(), "summary.json")).expect("json");
    assert_eq!(summary["rotation_outputs"], "omitted: rotation disabled");
    let files: Vec<&str> = summary["files_written"]
        .as_array()
        .expect("files")
        .iter()
        .map(|v| v.as_str().expect("str"))
        .collect();
    assert_eq!(files, ["fig2.csv", "fig3.csv"]);
}

#[test]
fn swapping_arms_negates_the_separation_channels() {
    let dir_a = tempfile::tempdir().expect("tempdir");
    let dir_b = tempfile::tempdir().expect("tempdir");
    let base = [
        "run",
        "--preset",
        "table1",
        "--samples-per-stage",
        "120",
        "--rotation_on=false",
        "--outputs",
        "fig2",
    ];
    let mut args_a: Vec<&str> = base.to_vec();
    let out_a = dir_a.path().to_str().expect("utf-8").to_owned();
    args_a.extend(["--out", &out_a]);
    run_ok(&args_a);

    let mut args_b: Vec<&str> = base.to_vec();
    let out_b = dir_b.path().to_str().expect("utf-8").to_owned();
    args_b.extend(["--out", &out_b, "--swap-arms"]);
    run_ok(&args_b);

    let rows_a = csv_rows(&read(dir_a.path(), "fig2.csv"));
    let rows_b = csv_rows(&read(dir_b.path(), "fig2.csv"));
    assert_eq!(rows_a.len(), rows_b.len());
    for (ra, rb) in rows_a.iter().zip(&rows_b) {
        // Columns: t, x+, vx+, x-, vx-, dx, dv. Swapping the spin
        // assignment exchanges the arm columns and negates the deltas.
        assert_eq!(ra[1], rb[3]);
        assert_eq!(ra[2], rb[4]);
        assert_eq!(ra[3], rb[1]);
        assert_eq!(ra[4], rb[2]);
        assert_eq!(ra[5] + 0.0, -rb[5] + 0.0);
        assert_eq!(ra[6] + 0.0, -rb[6] + 0.0);
    }
}

#[test]
fn seedless_flag_is_accepted() {
    let dir = tempfile::tempdir().expect("tempdir");
    run_ok(&[
        "run",
        "--preset",
        "table1",
        "--out",
        dir.path().to_str().expect("utf-8"),
        "--samples-per-stage",
        "120",
        "--rotation_on=false",
        "--seedless",
    ]);
}

#[test]
fn missing_config_file_is_a_config_error() {
    assert_eq!(
        exit_code(&["run", "--config", "/nonexistent/sgi.toml", "--out", "/tmp"]),
        2
    );
}

#[test]
fn coarse_resolution_is_rejected() {
    assert_eq!(
        exit_code(&[
            "run",
            "--preset",
            "table1",
            "--out",
            "/tmp",
            "--samples-per-stage",
            "50",
        ]),
        2
    );
}

#[test]
fn sweep_writes_a_monotone_contrast_table() {
    let dir = tempfile::tempdir().expect("tempdir");
    run_ok(&[
        "sweep",
        "--preset",
        "table1",
        "--out",
        dir.path().to_str().expect("utf-8"),
        "--omega0-points",
        "7",
    ]);

    let text = read(dir.path(), "fig6.csv");
    assert!(text.starts_with(
        "omega0_rad_per_s,nv_offset_m,n_occupation,contrast,exp_alpha,exp_gamma,exp_thermal"
    ));
    let rows = csv_rows(&text);
    // Default grids: 3 offsets x 3 occupations x 7 spin rates.
    assert_eq!(rows.len(), 3 * 3 * 7);

    // Within each (offset, occupation) series the contrast must not
    // decrease with the spin rate: faster rotation averages the thermal
    // wobble away.
    for series in rows.chunks(7) {
        let d = series[0][1];
        let n = series[0][2];
        assert!(series.iter().all(|r| r[1] == d && r[2] == n));
        assert!(series.windows(2).all(|w| w[0][0] < w[1][0]));
        assert!(
            series.windows(2).all(|w| w[1][3] >= w[0][3]),
            "contrast not monotone for d = {d}, n = {n}"
        );
    }

    // All four reported factors stay in their physical ranges.
    for r in &rows {
        assert!((0.0..=1.0).contains(&r[3]));
        assert!(r[4] >= 0.0 && r[5] >= 0.0 && r[6] >= 0.0);
    }
}

#[test]
fn sweep_rejects_empty_or_invalid_ranges() {
    assert_eq!(
        exit_code(&["sweep", "--preset", "table1", "--out", "/tmp", "--omega0-points", "0"]),
        2
    );
    assert_eq!(
        exit_code(&["sweep", "--preset", "table1", "--out", "/tmp", "--omega0-min", "0"]),
        2
    );
    assert_eq!(
        exit_code(&[
            "sweep",
            "--preset",
            "table1",
            "--out",
            "/tmp",
            "--omega0-min",
            "1e9",
            "--omega0-max",
            "1e8",
        ]),
        2
    );
}

#[test]
fn tune_reports_the_preset_as_already_closed() {
    let dir = tempfile::tempdir().expect("tempdir");
    run_ok(&[
        "tune",
        "--preset",
        "table1",
        "--out",
        dir.path().to_str().expect("utf-8"),
    ]);

    let report: Value = serde_json::from_str(&read(dir.path(), "tune_report.json")).expect("json");
    assert_eq!(report["iterations"], 0);
    assert_eq!(report["changed"], false);
    assert_eq!(report["config_hash_before"], report["config_hash_after"]);
    assert!(report["residual_dx_m"].as_f64().expect("dx").abs() < 1e-9);
    assert!(report["residual_dv_m_per_s"].as_f64().expect("dv").abs() < 1e-9);

    // The tuned config must round-trip through the parser with the
    // closing stage untouched.
    let toml_text = read(dir.path(), "tuned_config.toml");
    assert!(toml_text.contains("eta = 4460.0"));
    assert!(toml_text.contains("tau = 0.0046677"));
}

#[test]
fn validate_passes_the_reference_preset() {
    let out = run_ok(&["validate", "--preset", "table1"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.trim_end().ends_with("ok"), "stdout: {stdout}");
    assert!(stdout.contains("field residuals"));
}

#[test]
fn config_file_round_trips_through_run() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("config.toml");

    // Write the reference preset out through tune (which serializes the
    // effective config), then feed the file back through run.
    run_ok(&[
        "tune",
        "--preset",
        "table1",
        "--out",
        dir.path().to_str().expect("utf-8"),
    ]);
    std::fs::rename(dir.path().join("tuned_config.toml"), &cfg_path).expect("rename");

    let out_dir = tempfile::tempdir().expect("tempdir");
    run_ok(&[
        "run",
        "--config",
        cfg_path.to_str().expect("utf-8"),
        "--out",
        out_dir.path().to_str().expect("utf-8"),
        "--samples-per-stage",
        "120",
        "--rotation_on=false",
        "--outputs",
        "fig2",
    ]);
    let summary: Value =
        serde_json::from_str(&read(out_dir.path(), "summary.json")).expect("json");
    let dx_max = summary["separation"]["dx_max_m"].as_f64().expect("dx_max");
    assert!((5e-6..=2e-5).contains(&dx_max));
    let source = summary["config_source"].as_str().expect("source");
    assert!(source.starts_with("file:"), "source: {source}");
}
