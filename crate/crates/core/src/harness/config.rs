use std::path::Path;

use serde::{Deserialize, Serialize};

use super::data::PerturbationSpec;
use crate::domain::{SlabGrid, Window};
use crate::eos::{Cutoff, EosParams};
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::solver::{FluxKind, Integrator, SolverConfig};
use crate::target::TargetInit;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Euler,
    #[serde(alias = "ns")]
    NavierStokes,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Mode::Euler),
            "ns" | "navier-stokes" => Ok(Mode::NavierStokes),
            _ => Err(Error::Config(format!("unknown mode {s:?}, expected euler or ns"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    /// Strictly decreasing values in `(0, 1]`.
    pub eps: Vec<f64>,
    pub m: f64,
    pub n: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_big_gamma")]
    pub big_gamma: f64,
}

fn default_big_gamma() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "two_pi")]
    pub length: f64,
    pub nh: usize,
    pub nv: usize,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub flux: FluxKind,
    /// Largest substep of the target solver.
    #[serde(default = "default_target_dt")]
    pub target_max_dt: f64,
}

fn default_cfl() -> f64 {
    SolverConfig::DEFAULT_CFL
}

fn default_target_dt() -> f64 {
    1e-2
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            cfl: default_cfl(),
            integrator: Integrator::default(),
            flux: FluxKind::default(),
            target_max_dt: default_target_dt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Velocity-error window as fractions of the box length.
    #[serde(default = "default_window")]
    pub window: ((f64, f64), (f64, f64)),
    #[serde(default)]
    pub cutoff: Cutoff,
    /// Evaluate the weak-residual suite during each run.
    #[serde(default = "yes")]
    pub weak_residuals: bool,
}

fn default_window() -> ((f64, f64), (f64, f64)) {
    ((0.25, 0.75), (0.25, 0.75))
}

fn yes() -> bool {
    true
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            window: default_window(),
            cutoff: Cutoff::default(),
            weak_residuals: true,
        }
    }
}

/// Pass/fail thresholds applied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Allowed energy growth relative to `E_0`.
    #[serde(default = "default_energy_tol")]
    pub energy_tolerance: f64,
    /// Density slope must be at least `m - density_slope_slack`.
    #[serde(default = "default_slope_slack")]
    pub density_slope_slack: f64,
    /// `E(T)` at the smallest eps over `E(T)` at the largest.
    #[serde(default = "default_energy_ratio")]
    pub energy_ratio: f64,
    /// Budget closure relative to `E(T)`.
    #[serde(default = "default_closure")]
    pub closure: f64,
}

fn default_energy_tol() -> f64 {
    1e-10
}
fn default_slope_slack() -> f64 {
    0.75
}
fn default_energy_ratio() -> f64 {
    0.25
}
fn default_closure() -> f64 {
    0.1
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            energy_tolerance: default_energy_tol(),
            density_slope_slack: default_slope_slack(),
            energy_ratio: default_energy_ratio(),
            closure: default_closure(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub t_final: f64,
    pub output_every: f64,
    pub scaling: ScalingSection,
    #[serde(default)]
    pub eos: EosParams,
    pub grid: GridSection,
    #[serde(default)]
    pub target: TargetInit,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub solver: SolverSection,
    /// Used in Navier-Stokes mode.
    #[serde(default)]
    pub viscosity: ViscosityParams,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    /// gamma = 2, a = 0.5, m = 3, n = 1, eps in {0.4, 0.3, 0.2}, 64^2 x 8,
    /// L = 2 pi, T = 0.5, Taylor-Green target.
    pub fn default_preset() -> Self {
        ExperimentConfig {
            mode: Mode::Euler,
            seed: 0,
            t_final: 0.5,
            output_every: 0.1,
            scaling: ScalingSection {
                eps: vec![0.4, 0.3, 0.2],
                m: 3.0,
                n: 1.0,
                alpha: 0.0,
                delta: 0.0,
                big_gamma: 2.0,
            },
            eos: EosParams::default(),
            grid: GridSection {
                length: two_pi(),
                nh: 64,
                nv: 8,
            },
            target: TargetInit::default(),
            perturbation: PerturbationSpec::default(),
            solver: SolverSection::default(),
            viscosity: ViscosityParams::default(),
            diagnostics: DiagnosticsSection::default(),
            thresholds: Thresholds::default(),
        }
    }

    /// The default preset with alpha = 1, mu = lambda = 1 and gamma = 1.4.
    pub fn ns_preset() -> Self {
        let mut c = Self::default_preset();
        c.mode = Mode::NavierStokes;
        c.scaling.alpha = 1.0;
        c.eos.gamma = 1.4;
        c
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" | "euler" => Ok(Self::default_preset()),
            "ns" | "navier-stokes" => Ok(Self::ns_preset()),
            _ => Err(Error::Config(format!("unknown preset {name:?}"))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads and validates a config file; returns the raw text too.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok((Self::from_toml(&text)?, text))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Switches the mode; entering Navier-Stokes mode with `alpha = 0`
    /// sets `alpha = 1`.
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        match mode {
            Mode::NavierStokes if self.scaling.alpha == 0.0 => self.scaling.alpha = 1.0,
            Mode::Euler => self.scaling.alpha = 0.0,
            _ => {}
        }
        self
    }

    /// Overrides the seed, including that of a random target preset.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let TargetInit::RandomModes { seed: s, .. } = &mut self.target {
            *s = seed;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scaling;
        if s.eps.is_empty() {
            return Err(Error::Config("at least one eps value is required".into()));
        }
        for w in s.eps.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::Config(format!("eps values must be strictly decreasing, got {:?}", s.eps)));
            }
        }
        for &e in &s.eps {
            self.scaling_for(e)?;
        }
        self.eos.validate()?;
        self.grid()?;
        if !(self.t_final > 0.0) || !(self.output_every > 0.0) {
            return Err(Error::Config(format!(
                "t_final ({}) and output_every ({}) must be positive",
                self.t_final, self.output_every
            )));
        }
        self.perturbation.validate()?;
        self.window()?.validate(&self.grid()?)?;
        match self.mode {
            Mode::NavierStokes if !(s.alpha > 0.0) => {
                return Err(Error::Config("navier-stokes mode needs alpha > 0".into()));
            }
            Mode::Euler if s.alpha != 0.0 => {
                return Err(Error::Config(format!("euler mode needs alpha = 0, got {}", s.alpha)));
            }
            _ => {}
        }
        if self.mode == Mode::NavierStokes {
            self.viscosity.validate()?;
        }
        if !(self.solver.cfl > 0.0 && self.solver.cfl <= 1.0) || !(self.solver.target_max_dt > 0.0) {
            return Err(Error::Config(format!("bad solver section {:?}", self.solver)));
        }
        Ok(())
    }

    pub fn scaling_for(&self, eps: f64) -> Result<ScalingParams> {
        let s = &self.scaling;
        ScalingParams::full(eps, s.m, s.n, s.alpha, s.delta, s.big_gamma).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<SlabGrid> {
        SlabGrid::new(self.grid.length, self.grid.nh, self.grid.nv)
    }

    pub fn window(&self) -> Result<Window> {
        let l = self.grid.length;
        let ((x0, x1), (y0, y1)) = self.diagnostics.window;
        Ok(Window::new((x0 * l, x1 * l), (y0 * l, y1 * l)))
    }

    pub fn viscosity(&self) -> Option<ViscosityParams> {
        (self.mode == Mode::NavierStokes).then_some(self.viscosity)
    }

    pub fn solver_config(&self, eps: f64) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(self.eos, self.scaling_for(eps)?);
        c.viscosity = self.viscosity();
        c.cfl = self.solver.cfl;
        c.integrator = self.solver.integrator;
        c.flux = self.solver.flux;
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ExperimentConfig::default_preset().validate().unwrap();
        let ns = ExperimentConfig::ns_preset();
        ns.validate().unwrap();
        assert_eq!(ns.eos.gamma, 1.4);
        assert_eq!(ns.viscosity(), Some(ViscosityParams::default()));
    }

    #[test]
    fn toml_round_trip() {
        let c = ExperimentConfig::ns_preset().with_seed(7);
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let text = r#"
            t_final = 0.2
            output_every = 0.05
            [scaling]
            eps = [0.5, 0.4, 0.3]
            m = 3
            n = 1
            [grid]
            nh = 16
            nv = 4
            [target]
            preset = "random-modes"
            count = 4
            kmax = 3
            seed = 1
        "#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.eos, EosParams::default());
        assert!((c.grid.length - two_pi()).abs() < 1e-15);
        assert_eq!(c.clone().with_seed(9).target, TargetInit::RandomModes { count: 4, kmax: 3, seed: 9, amplitude: 1.0 });
    }

    #[test]
    fn invalid_regimes_are_rejected() {
        let bad = |f: &dyn Fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default_preset();
            f(&mut c);
            assert!(matches!(c.validate(), Err(Error::Config(_)) | Err(Error::Parameter(_))), "{c:?}");
        };
        bad(&|c| c.scaling.n = 1.5);
        bad(&|c| c.scaling.n = 0.5);
        bad(&|c| c.eos.gamma = 1.0);
        bad(&|c| c.scaling.eps = vec![0.4, 1.2]);
        bad(&|c| c.scaling.eps = vec![0.2, 0.3]);
        bad(&|c| c.perturbation.theta = Some(-1.0));
        bad(&|c| c.mode = Mode::NavierStokes);
        bad(&|c| c.t_final = 0.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = ExperimentConfig::default_preset().to_toml().unwrap();
        text.push_str("\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn mode_switch() {
        let c = ExperimentConfig::default_preset().with_mode("ns".parse().unwrap());
        assert_eq!(c.scaling.alpha, 1.0);
        c.validate().unwrap();
        assert!("stokes".parse::<Mode>().is_err());
    }
}
