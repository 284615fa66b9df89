//! TOML-facing run configuration: particle, trap, rotation, wave-packet,
//! and contrast parameters plus the five-stage sequence, with the
//! reference preset embedded in code.
//!
//! Stage `kind` strings are resolved through the stage-model registry,
//! and per-stage spin projections may be overridden (e.g. all-zero spins
//! give a drive-free sequence); when omitted they default to the model's
//! convention.

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::fields::{TrapParams, TrapSign};
use crate::particle::{deg_to_rad, ParticleSpec};
use crate::schedule::{build_schedule, Schedule, StageConfig};
use crate::stage::model_by_name;
use crate::wavepacket::PacketState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleSection {
    pub mass: f64,
    pub radius: f64,
    pub susceptibility: f64,
    pub nv_offset: f64,
    pub nv_angle_deg: f64,
    pub x0: f64,
    pub y0: f64,
    pub vx0: f64,
    pub vy0: f64,
}

impl Default for ParticleSection {
    fn default() -> Self {
        ParticleSection {
            mass: 1.0e-15,
            radius: 4.0858e-7,
            susceptibility: -6.2e-9,
            nv_offset: 1.0e-8,
            nv_angle_deg: 30.0,
            x0: 0.0,
            y0: 1.1e-6,
            vx0: 0.0,
            vy0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub enabled: bool,
    pub omega_y: f64,
    /// Longitudinal trap frequency; recorded for completeness but unused
    /// by the planar model (the x channel is controlled by the stages).
    pub omega_x: f64,
    pub sign: TrapSign,
}

impl Default for TrapSection {
    fn default() -> Self {
        TrapSection {
            enabled: true,
            omega_y: 521.0,
            omega_x: 0.01,
            sign: TrapSign::AsWritten,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationSection {
    pub enabled: bool,
    /// Body spin rate [rad/s].
    pub omega0: f64,
    /// Initial tilt [rad].
    pub beta0: f64,
}

impl Default for RotationSection {
    fn default() -> Self {
        RotationSection {
            enabled: true,
            omega0: 2.0 * std::f64::consts::PI * 1.0e4,
            beta0: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavepacketSection {
    /// Initial width [m]; defaults to the harmonic ground width of the
    /// first stage, sqrt(hbar / (2 m omega_1)).
    pub sigma0: Option<f64>,
    /// Initial quadratic phase [1/m^2].
    pub a0: f64,
    /// Initial linear phase [1/m]; defaults to m vx0 / hbar so the mean
    /// velocity matches the classical initial condition.
    pub b0: Option<f64>,
    /// Initial constant phase [rad].
    pub c0: f64,
}

impl Default for WavepacketSection {
    fn default() -> Self {
        WavepacketSection {
            sigma0: None,
            a0: 0.0,
            b0: None,
            c0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContrastSection {
    pub n_thermal: f64,
    /// Momentum spreads conjugate to the two fast angles, in hbar units.
    pub sigma_p_alpha: f64,
    pub sigma_p_gamma: f64,
    /// Reference angle differences for the contrast estimate [rad].
    pub delta_alpha: f64,
    pub delta_gamma: f64,
}

impl Default for ContrastSection {
    fn default() -> Self {
        ContrastSection {
            n_thermal: 20.0,
            sigma_p_alpha: 5.0,
            sigma_p_gamma: 5.0,
            delta_alpha: 0.1,
            delta_gamma: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSection {
    /// Stage-model registry name ("linear" or "nonlinear").
    pub kind: String,
    /// Bias / scale field [T].
    pub b0: f64,
    /// Gradient [T/m] (linear) or curvature [T/m^2] (nonlinear).
    pub eta: f64,
    /// Duration [s].
    pub tau: f64,
    /// Spin projections per arm; default from the stage model.
    #[serde(default)]
    pub spin_plus: Option<f64>,
    #[serde(default)]
    pub spin_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub particle: ParticleSection,
    pub trap: TrapSection,
    pub rotation: RotationSection,
    pub wavepacket: WavepacketSection,
    pub contrast: ContrastSection,
    pub stage: Vec<StageSection>,
}

impl Default for Config {
    fn default() -> Self {
        Config::reference_preset()
    }
}

impl Config {
    /// The published reference sequence.
    ///
    /// Stage-3 duration is carried to full precision: the recombination
    /// residual depends exponentially on it through the second expansion
    /// stage, and rounding it to a few digits moves the final-stage
    /// closure out of reach of any (eta_5, tau_5).
    pub fn reference_preset() -> Config {
        Config {
            particle: ParticleSection::default(),
            trap: TrapSection::default(),
            rotation: RotationSection::default(),
            wavepacket: WavepacketSection::default(),
            contrast: ContrastSection::default(),
            stage: vec![
                StageSection {
                    kind: "linear".into(),
                    b0: 0.001,
                    eta: 5000.0,
                    tau: 0.0044601,
                    spin_plus: None,
                    spin_minus: None,
                },
                StageSection {
                    kind: "nonlinear".into(),
                    b0: 0.1,
                    eta: 5.0e6,
                    tau: 0.1098999,
                    spin_plus: None,
                    spin_minus: None,
                },
                StageSection {
                    kind: "linear".into(),
                    b0: 0.001,
                    eta: 5000.0,
                    tau: 0.0011245620924859021,
                    spin_plus: None,
                    spin_minus: None,
                },
                StageSection {
                    kind: "nonlinear".into(),
                    b0: 0.1,
                    eta: 5.0054e6,
                    tau: 0.109901,
                    spin_plus: None,
                    spin_minus: None,
                },
                StageSection {
                    kind: "linear".into(),
                    b0: 0.001,
                    eta: 4460.0,
                    tau: 0.0046677,
                    spin_plus: None,
                    spin_minus: None,
                },
            ],
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Config> {
        toml::from_str(s).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn particle_spec(&self) -> ParticleSpec {
        ParticleSpec {
            mass: self.particle.mass,
            radius: self.particle.radius,
            susceptibility: self.particle.susceptibility,
            nv_offset: self.particle.nv_offset,
            nv_angle: deg_to_rad(self.particle.nv_angle_deg),
            beta0: self.rotation.beta0,
            omega0: self.rotation.omega0,
            x0: self.particle.x0,
            y0: self.particle.y0,
            vx0: self.particle.vx0,
            vy0: self.particle.vy0,
        }
    }

    pub fn trap_params(&self) -> TrapParams {
        TrapParams {
            enabled: self.trap.enabled,
            omega_y: self.trap.omega_y,
            sign: self.trap.sign,
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let stages = self
            .stage
            .iter()
            .map(|s| {
                let model = model_by_name(&s.kind).ok_or_else(|| {
                    Error::ConfigParse(format!(
                        "unknown stage kind '{}' (known: linear, nonlinear)",
                        s.kind
                    ))
                })?;
                let (dp, dm) = model.default_spins();
                Ok(StageConfig {
                    kind: model.kind(),
                    b0: s.b0,
                    eta: s.eta,
                    tau: s.tau,
                    spin_plus: s.spin_plus.unwrap_or(dp),
                    spin_minus: s.spin_minus.unwrap_or(dm),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        build_schedule(stages)
    }

    /// Initial wave packet implied by the configuration.
    pub fn initial_packet(&self) -> Result<PacketState> {
        let particle = self.particle_spec();
        let schedule = self.schedule()?;
        let sigma0 = match self.wavepacket.sigma0 {
            Some(s) if s > 0.0 => s,
            Some(s) => {
                return Err(Error::ConfigParse(format!(
                    "wavepacket.sigma0 must be positive, got {s}"
                )))
            }
            None => {
                let stage1 = &schedule.stages()[0];
                let freq = crate::stage::model_for(stage1.kind).frequencies(
                    stage1,
                    &particle,
                    &self.trap_params(),
                );
                (HBAR / (2.0 * particle.mass * freq.omega)).sqrt()
            }
        };
        let b0 = self
            .wavepacket
            .b0
            .unwrap_or(particle.mass * particle.vx0 / HBAR);
        Ok(PacketState {
            sigma: sigma0,
            x_c: particle.x0,
            a: self.wavepacket.a0,
            b: b0,
            c: self.wavepacket.c0,
        })
    }

    /// Hard validation (errors) plus advisory lints (returned strings).
    pub fn validate(&self) -> Result<Vec<String>> {
        let particle = self.particle_spec();
        particle.validate()?;
        let schedule = self.schedule()?;
        if self.rotation.enabled {
            if !self.rotation.omega0.is_finite() || self.rotation.omega0 <= 0.0 {
                return Err(Error::ConfigParse(format!(
                    "rotation.omega0 must be positive and finite, got {}",
                    self.rotation.omega0
                )));
            }
            if !(self.rotation.beta0 > 0.0 && self.rotation.beta0 < std::f64::consts::PI) {
                return Err(Error::ConfigParse(format!(
                    "rotation.beta0 must lie in (0, pi), got {}",
                    self.rotation.beta0
                )));
            }
        }
        if self.trap.omega_y < 0.0 {
            return Err(Error::ConfigParse(format!(
                "trap.omega_y must be non-negative, got {}",
                self.trap.omega_y
            )));
        }
        self.initial_packet()?;

        let mut lints = Vec::new();
        for (i, (entry, built)) in self.stage.iter().zip(schedule.stages()).enumerate() {
            let model = model_by_name(&entry.kind).expect("validated above");
            if (built.spin_plus, built.spin_minus) != model.default_spins() {
                lints.push(format!(
                    "stage {}: nonstandard spin pattern ({}, {}); the \
                     difference channel drive changes accordingly",
                    i + 1,
                    built.spin_plus,
                    built.spin_minus
                ));
            }
        }
        if self.stage.iter().all(|s| {
            s.spin_plus.unwrap_or(1.0) == 0.0 && s.spin_minus.unwrap_or(-1.0) == 0.0
        }) {
            lints.push(
                "all spins are zero: the arms never separate and the \
                 interferometer is trivially closed"
                    .into(),
            );
        }
        if !self.trap.enabled {
            lints.push(
                "trap disabled: the transverse channel is unstable in the \
                 expansion stages and the motion grows exponentially"
                    .into(),
            );
        }
        if !self.rotation.enabled {
            lints.push("rotation disabled: orientation channels are frozen at zero".into());
        }
        Ok(lints)
    }
}
