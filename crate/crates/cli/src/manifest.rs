//! Resolution of the effective run configuration: preset or file, plus
//! command-line overrides.

use std::path::Path;

use sgi_core::fields::TrapSign;
use sgi_core::stage::model_by_name;
use sgi_core::{Config, Error};

use crate::{CliError, CommonArgs};

/// Loads the configuration selected by `--preset`/`--config` and applies
/// the override flags. Returns the effective config together with a
/// human-readable source label (stable across reruns of the same
/// invocation, so it is safe to embed in outputs).
pub fn effective_config(common: &CommonArgs) -> Result<(Config, String), CliError> {
    let (mut cfg, source) = match (&common.preset, &common.config) {
        (_, None) => {
            let name = common.preset.as_deref().unwrap_or("table1");
            (Config::reference_preset(), format!("preset:{name}"))
        }
        (None, Some(path)) => (load_file(path)?, format!("file:{}", path.display())),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };

    if let Some(on) = common.trap_on {
        cfg.trap.enabled = on;
    }
    if let Some(on) = common.rotation_on {
        cfg.rotation.enabled = on;
    }
    if let Some(sign) = &common.trap_sign {
        cfg.trap.sign = match sign.as_str() {
            "as_written" => TrapSign::AsWritten,
            _ => TrapSign::Conventional,
        };
    }
    if common.swap_arms {
        swap_arms(&mut cfg)?;
    }
    Ok((cfg, source))
}

fn load_file(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Core(Error::ConfigParse(format!("{}: {e}", path.display())))
    })?;
    Ok(Config::from_toml_str(&text)?)
}

/// Exchanges the spin patterns of the two arms in every stage, writing
/// the swapped values explicitly so the change survives serialization.
fn swap_arms(cfg: &mut Config) -> Result<(), CliError> {
    for s in &mut cfg.stage {
        let model = model_by_name(&s.kind).ok_or_else(|| {
            Error::ConfigParse(format!("unknown stage kind '{}'", s.kind))
        })?;
        let (dp, dm) = model.default_spins();
        let plus = s.spin_plus.unwrap_or(dp);
        let minus = s.spin_minus.unwrap_or(dm);
        s.spin_plus = Some(minus);
        s.spin_minus = Some(plus);
    }
    Ok(())
}
