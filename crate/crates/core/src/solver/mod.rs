//! Explicit finite-volume integrator for the scaled primitive system
//!
//! ```text
//! d_t rho + div m = 0
//! d_t m + div(m (x) m / rho) + eps^-2m grad p + eps^-1 b x m = eps^-2n rho grad G (+ eps^alpha div S)
//! ```
//!
//! written in perturbation form around a static profile so that
//! `(rho_tilde, 0)` is an exact discrete equilibrium.

mod artificial;
mod energy;
mod flux;
mod run;
mod source;
mod step;
mod viscous;

pub use artificial::artificial_pressure_term;
pub use energy::{kinetic_density, total_energy};
pub use flux::{hyperbolic_flux, CellState};
pub use run::{run, Observer, RunOutput, SeriesRow};
pub use source::source_terms;
pub use step::{stable_dt, PrimitiveSolver, StepReport};
pub use viscous::{stress_tensor, viscous_flux, ViscousTendency};
pub(crate) use viscous::stress_field;

use serde::{Deserialize, Serialize};

use crate::eos::EosParams;
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::{Error, Result};

/// Densities below this are clamped and reported.
pub const VACUUM_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FluxKind {
    /// Local Lax-Friedrichs: full wave-speed dissipation on every component.
    Rusanov,
    /// Rusanov dissipation on the density perturbation only; velocity jumps
    /// are damped with the advective speed. Keeps vortical dissipation
    /// independent of the Mach number.
    #[default]
    LowMach,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    ForwardEuler,
    /// Two-stage strong-stability-preserving Runge-Kutta.
    Heun,
}

/// Physical terms that can be switched off for verification runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terms {
    pub advection: bool,
    pub pressure: bool,
    pub gravity: bool,
    pub coriolis: bool,
}

impl Default for Terms {
    fn default() -> Self {
        Terms {
            advection: true,
            pressure: true,
            gravity: true,
            coriolis: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eos: EosParams,
    pub scaling: ScalingParams,
    /// Active only when `scaling.alpha > 0`.
    pub viscosity: Option<ViscosityParams>,
    pub cfl: f64,
    pub integrator: Integrator,
    pub flux: FluxKind,
    pub terms: Terms,
}

impl SolverConfig {
    pub const DEFAULT_CFL: f64 = 0.3;

    pub fn new(eos: EosParams, scaling: ScalingParams) -> Self {
        SolverConfig {
            eos,
            scaling,
            viscosity: None,
            cfl: Self::DEFAULT_CFL,
            integrator: Integrator::default(),
            flux: FluxKind::default(),
            terms: Terms::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.eos.validate()?;
        self.scaling.validate()?;
        if let Some(v) = &self.viscosity {
            v.validate()?;
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        Ok(())
    }

    /// Viscosity coefficients when the viscous term is active.
    pub fn active_viscosity(&self) -> Option<(ViscosityParams, f64)> {
        match self.viscosity {
            Some(v) if self.scaling.alpha > 0.0 => Some((v, self.scaling.viscous_coeff())),
            _ => None,
        }
    }
}
