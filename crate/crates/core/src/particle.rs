//! Particle description: mass, size, NV-center geometry, rotor state, and
//! initial conditions shared by trajectory and dynamics runs.

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};

/// Convert degrees to radians (convenience for CLI/config surfaces; the
/// library itself works in radians everywhere).
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * std::f64::consts::PI / 180.0
}

/// A levitated nanodiamond with a single NV center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    /// Mass [kg].
    pub mass: f64,
    /// Radius [m] (sphere; moment of inertia 2/5 m R^2).
    pub radius: f64,
    /// Mass susceptibility [m^3/kg], negative for diamagnets.
    pub susceptibility: f64,
    /// NV displacement from the center of mass [m].
    pub nv_offset: f64,
    /// Angle between the NV axis and the body symmetry axis [rad].
    pub nv_angle: f64,
    /// Initial polar angle of the spin axis [rad].
    pub beta0: f64,
    /// Spin frequency about the symmetry axis [rad/s].
    pub omega0: f64,
    /// Initial transverse displacement [m].
    pub y0: f64,
    /// Initial longitudinal displacement [m].
    pub x0: f64,
    /// Initial longitudinal velocity [m/s].
    pub vx0: f64,
    /// Initial transverse velocity [m/s].
    pub vy0: f64,
}

impl ParticleSpec {
    /// Moment of inertia of the (spherical) particle [kg m^2].
    pub fn moment_of_inertia(&self) -> f64 {
        0.4 * self.mass * self.radius * self.radius
    }

    /// NV magnetic moment [J/T]. Constant material property.
    pub fn nv_moment(&self) -> f64 {
        constants::MU_NV
    }

    /// Checks the signs the dynamics relies on.
    pub fn validate(&self) -> Result<()> {
        if self.susceptibility >= 0.0 {
            return Err(Error::NonNegativeSusceptibility(self.susceptibility));
        }
        Ok(())
    }
}

impl Default for ParticleSpec {
    /// The reference nanodiamond: 1 fg mass, 0.41 um radius, NV offset
    /// 10 nm at 30 degrees, beta0 = 0.01 rad, spin 2 pi x 10 kHz,
    /// released 1.1 um off the trap axis.
    fn default() -> Self {
        ParticleSpec {
            mass: 1.0e-15,
            radius: 4.0858e-7,
            susceptibility: constants::CHI_RHO,
            nv_offset: 1.0e-8,
            nv_angle: std::f64::consts::FRAC_PI_6,
            beta0: 0.01,
            omega0: 2.0 * std::f64::consts::PI * 1.0e4,
            y0: 1.1e-6,
            x0: 0.0,
            vx0: 0.0,
            vy0: 0.0,
        }
    }
}

/// Which interferometer arm a state belongs to. The `Plus` arm carries
/// spin +1 during linear stages (and is pushed toward negative x); the
/// `Minus` arm carries spin -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arm {
    Plus,
    Minus,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::Plus, Arm::Minus];

    /// Sign convention used in CSV headers and summaries.
    pub fn label(self) -> &'static str {
        match self {
            Arm::Plus => "plus",
            Arm::Minus => "minus",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_of_inertia_of_reference_particle() {
        let p = ParticleSpec::default();
        let i = p.moment_of_inertia();
        assert!((i - 6.677_504_656e-29).abs() / i < 1e-12);
    }

    #[test]
    fn default_particle_validates() {
        ParticleSpec::default().validate().unwrap();
    }

    #[test]
    fn positive_susceptibility_rejected() {
        let p = ParticleSpec {
            susceptibility: 1.0e-9,
            ..ParticleSpec::default()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::NonNegativeSusceptibility(_))
        ));
    }

    #[test]
    fn degree_helper() {
        assert!((deg_to_rad(30.0) - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
    }
}
