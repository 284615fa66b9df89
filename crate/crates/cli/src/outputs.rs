//! Deterministic file emission: CSV tables with one-line headers and a
//! JSON run summary. Floating-point values are written in exponent form
//! with shortest round-trip precision, so identical inputs give
//! byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Shortest round-trip exponent formatting shared by every CSV column.
pub fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Writes a CSV table: one header line, then one line per row.
pub fn write_csv<I>(dir: &Path, name: &str, header: &str, rows: I) -> Result<PathBuf, CliError>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        let mut line = String::new();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&fmt(*v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Check(format!("summary serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

// ---------------------------------------------------------------------
// summary.json schema
// ---------------------------------------------------------------------

#[derive(Serialize)]
pub struct Summary {
    /// SHA-256 of the effective configuration's canonical TOML form.
    pub config_hash: String,
    pub config_source: String,
    pub advisory_lints: Vec<String>,
    pub schedule: ScheduleSummary,
    pub stages: Vec<StageSummary>,
    pub separation: SeparationSummary,
    pub validity: Vec<ValiditySummary>,
    pub recombination: RecombinationSummary,
    pub wavepackets: Option<PacketSummary>,
    /// Whether the orientation tables (fig4/fig5) were produced; when the
    /// rotor dynamics are disabled they are omitted.
    pub rotation_outputs: String,
    pub files_written: Vec<String>,
}

#[derive(Serialize)]
pub struct ScheduleSummary {
    pub transition_times_s: [f64; 5],
    pub total_time_s: f64,
}

#[derive(Serialize)]
pub struct StageSummary {
    pub kind: String,
    pub b0_t: f64,
    pub eta: f64,
    pub tau_s: f64,
    /// Characteristic angular frequency of the stage [rad/s].
    pub omega_rad_per_s: f64,
    pub k_x_per_s2: f64,
    pub k_y_per_s2: f64,
    pub spin_plus: f64,
    pub spin_minus: f64,
    pub drive_accel_plus_m_per_s2: f64,
    pub drive_accel_minus_m_per_s2: f64,
}

#[derive(Serialize)]
pub struct SeparationSummary {
    pub dx_max_m: f64,
    pub t_at_dx_max_s: f64,
    pub closure_residual_dx_m: f64,
    pub closure_residual_dv_m_per_s: f64,
}

#[derive(Serialize)]
pub struct ValiditySummary {
    pub stage_index: usize,
    pub x_extent_m: f64,
    pub ratio: f64,
    pub valid: bool,
}

#[derive(Serialize)]
pub struct RecombinationSummary {
    /// Field scale from the dimensionally consistent form
    /// B0*beta0 + eta5*y0 + d*eta5*sin(angle) [T].
    pub field_scale_t: f64,
    /// The abbreviated form often quoted alongside it (mixes a raw
    /// length into field terms); reported for comparison only.
    pub field_scale_shorthand: f64,
    pub spin_coherence_bound: f64,
    pub contrast: ContrastSummary,
}

#[derive(Serialize)]
pub struct ContrastSummary {
    pub delta_alpha_rad: f64,
    pub delta_gamma_rad: f64,
    pub sigma_p_alpha_hbar: f64,
    pub sigma_p_gamma_hbar: f64,
    pub n_thermal: f64,
    pub omega0_rad_per_s: f64,
    pub exp_alpha: f64,
    pub exp_gamma: f64,
    pub exp_thermal: f64,
    pub total_exponent: f64,
    pub contrast: f64,
}

#[derive(Serialize)]
pub struct PacketSummary {
    /// Shared final width of both arms' packets [m].
    pub sigma_t5_m: f64,
    pub plus: PacketArmSummary,
    pub minus: PacketArmSummary,
    pub overlap: OverlapSummary,
}

#[derive(Serialize)]
pub struct PacketArmSummary {
    pub center_m: f64,
    pub mean_velocity_m_per_s: f64,
}

#[derive(Serialize)]
pub struct OverlapSummary {
    pub contrast: f64,
    pub log_contrast: f64,
    pub exp_separation: f64,
    pub exp_momentum: f64,
    pub phase_rad: f64,
}
