//! One eps-run: statics, well-prepared data, the primitive solver with the
//! target solver advanced in lockstep, and every diagnostic along the way.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::data::well_prepared_data;
use crate::diagnostics::{
    coercivity_check, default_suite, l1loc_velocity_error, norm_l2_lgamma, BudgetAccumulator, BudgetReport,
    CoercivityCheck, WeakResidualAccumulator, WeakResidualReport,
};
use crate::domain::{State, Window};
use crate::eos::{Cutoff, EosParams};
use crate::scaling::ScalingParams;
use crate::solver::{run, Observer, PrimitiveSolver, SeriesRow, StepReport};
use crate::statics::{static_density, StaticProfile};
use crate::target::{TargetFrame, TargetSolver};
use crate::Result;

/// One row per output time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputRow {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub defect: f64,
    pub relative_energy: f64,
    pub kinetic_part: f64,
    pub pressure_part: f64,
    pub density_norm: f64,
    pub velocity_error: f64,
    pub coercivity_ratio: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
    pub l7: f64,
    pub l8: f64,
    pub viscous_pairing: f64,
    pub closure: f64,
}

impl OutputRow {
    pub const HEADER: &'static str = "t,dt,mass,energy,dissipation,defect,relative_energy,kinetic_part,pressure_part,\
density_norm,velocity_error,coercivity_ratio,l1,l2,l3,l4,l5,l6,l7,l8,viscous_pairing,closure";

    fn csv(&self) -> String {
        [
            self.t,
            self.dt,
            self.mass,
            self.energy,
            self.dissipation,
            self.defect,
            self.relative_energy,
            self.kinetic_part,
            self.pressure_part,
            self.density_norm,
            self.velocity_error,
            self.coercivity_ratio,
            self.l1,
            self.l2,
            self.l3,
            self.l4,
            self.l5,
            self.l6,
            self.l7,
            self.l8,
            self.viscous_pairing,
            self.closure,
        ]
        .iter()
        .map(|v| format!("{v:e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

pub fn rows_csv(rows: &[OutputRow]) -> String {
    let mut out = String::from(OutputRow::HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub eps: f64,
    pub steps: usize,
    pub t_final: f64,
    pub initial_energy: f64,
    /// `sup_t ||rho - rho_tilde||_{L2 + Lgamma}` over every step.
    pub density_sup: f64,
    pub relative_energy_initial: f64,
    pub relative_energy_final: f64,
    pub velocity_error_final: f64,
    /// `max_t (E(t) + dissipation(t) - E_0) / E_0`; nonpositive when energy stable.
    pub energy_excess: f64,
    pub dissipation_monotone: bool,
    pub budget: BudgetReport,
    pub weak: Option<WeakResidualReport>,
    pub coercivity: CoercivityCheck,
    pub corrector_triple_norm: f64,
    pub corrector_relation: f64,
    pub floor_clamps: usize,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub summary: RunSummary,
    pub rows: Vec<OutputRow>,
    pub final_state: State,
    /// States at the output times when requested.
    pub trajectory: Vec<State>,
}

/// Observer advancing the target flow with the primitive run and feeding
/// every diagnostic.
struct Lockstep {
    target: TargetSolver,
    scaling: ScalingParams,
    eos: EosParams,
    chi: Cutoff,
    window: Window,
    rho_tilde: Vec<f64>,
    budget: BudgetAccumulator,
    weak: Option<WeakResidualAccumulator>,
    density_sup: f64,
    rows: Vec<OutputRow>,
    worst_coercivity: Option<CoercivityCheck>,
    frame: Option<TargetFrame>,
    corrector: (f64, f64),
    trajectory: Option<Vec<State>>,
}

impl Lockstep {
    fn sync(&mut self, state: &State) -> Result<()> {
        self.target.advance_to(state.time)?;
        let frame = TargetFrame::new(&self.target.spectral, &self.target.state, &self.scaling)?;
        self.budget.push(state, &frame)?;
        let dev: Vec<f64> = state.rho.iter().zip(&self.rho_tilde).map(|(r, t)| r - t).collect();
        let norm = norm_l2_lgamma(&state.grid, &dev, &state.rho, &self.chi, &self.eos)?;
        self.density_sup = self.density_sup.max(norm);
        let c = &frame.corrector;
        self.corrector.0 = self.corrector.0.max(c.triple_norm());
        self.corrector.1 = self.corrector.1.max(c.relation_residual(&self.target.state));
        self.frame = Some(frame);
        Ok(())
    }
}

impl Observer for Lockstep {
    fn start(&mut self, state: &State) -> Result<()> {
        self.sync(state)?;
        if let Some(w) = &mut self.weak {
            w.start(state)?;
        }
        Ok(())
    }

    fn step(&mut self, state: &State, report: &StepReport) -> Result<()> {
        self.sync(state)?;
        if let Some(w) = &mut self.weak {
            w.step(state, report)?;
        }
        Ok(())
    }

    fn output(&mut self, state: &State, row: &SeriesRow) -> Result<()> {
        if let Some(w) = &mut self.weak {
            w.output(state, row)?;
        }
        if let Some(tr) = &mut self.trajectory {
            tr.push(state.clone());
        }
        self.budget.record_defect(row);
        let b = self.budget.report(row)?;
        let rel = *self.budget.current().expect("pushed before output");
        let check = coercivity_check(&rel);
        if self.worst_coercivity.is_none_or(|w| check.worst_ratio > w.worst_ratio) {
            self.worst_coercivity = Some(check);
        }
        let v = &self.frame.as_ref().expect("synced before output").v;
        let velocity_error = l1loc_velocity_error(state, v, &self.window)?;
        let dev: Vec<f64> = state.rho.iter().zip(&self.rho_tilde).map(|(r, t)| r - t).collect();
        self.rows.push(OutputRow {
            t: row.t,
            dt: row.dt,
            mass: row.mass,
            energy: row.energy,
            dissipation: row.dissipation,
            defect: row.defect,
            relative_energy: rel.total,
            kinetic_part: rel.kinetic_part,
            pressure_part: rel.pressure_part,
            density_norm: norm_l2_lgamma(&state.grid, &dev, &state.rho, &self.chi, &self.eos)?,
            velocity_error,
            coercivity_ratio: check.worst_ratio,
            l1: b.terms[0],
            l2: b.terms[1],
            l3: b.terms[2],
            l4: b.terms[3],
            l5: b.terms[4],
            l6: b.terms[5],
            l7: b.terms[6],
            l8: b.terms[7],
            viscous_pairing: b.viscous_pairing,
            closure: b.closure,
        });
        Ok(())
    }
}

/// Options that do not belong in the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Overrides the config's weak-residual switch.
    pub weak_residuals: Option<bool>,
    /// Keeps the state at every output time.
    pub keep_trajectory: bool,
}

pub fn build_profile(config: &ExperimentConfig, eps: f64) -> Result<StaticProfile> {
    static_density(&config.scaling_for(eps)?, &config.eos, &config.grid()?)
}

/// Runs one eps of the experiment to `t_final`.
pub fn run_single(config: &ExperimentConfig, eps: f64, options: RunOptions) -> Result<RunRecord> {
    config.validate()?;
    let grid = config.grid()?;
    let scaling = config.scaling_for(eps)?;
    let profile = build_profile(config, eps)?;
    let solver = PrimitiveSolver::new(config.solver_config(eps)?, profile.clone())?;
    let target = TargetSolver::new(grid.nh, grid.length, &config.target, config.solver.target_max_dt)?;
    let initial = well_prepared_data(&scaling, &profile, &grid, &target.state.v, &config.perturbation)?;
    let chi = config.diagnostics.cutoff;
    let viscosity = config.viscosity();
    let weak = if options.weak_residuals.unwrap_or(config.diagnostics.weak_residuals) {
        Some(WeakResidualAccumulator::new(
            default_suite(),
            &grid,
            &profile,
            &scaling,
            &config.eos,
            viscosity.as_ref(),
        )?)
    } else {
        None
    };
    let mut lock = Lockstep {
        target,
        scaling,
        eos: config.eos,
        chi,
        window: config.window()?,
        rho_tilde: profile.field(&grid),
        budget: BudgetAccumulator::new(&profile, &scaling, &config.eos, &chi, viscosity.as_ref()),
        weak,
        density_sup: 0.0,
        rows: Vec::new(),
        worst_coercivity: None,
        frame: None,
        corrector: (0.0, 0.0),
        trajectory: options.keep_trajectory.then(Vec::new),
    };
    let out = run(&solver, &initial, config.t_final, Some(config.output_every), &mut [&mut lock])?;
    let last = *out.series.last().expect("run emits a final row");
    let budget = lock.budget.report(&last)?;
    let weak = match &lock.weak {
        Some(w) => Some(w.finish(&out.series)?),
        None => None,
    };
    let e0 = out.initial_energy;
    let energy_excess = out
        .series
        .iter()
        .map(|r| (r.energy + r.dissipation - e0) / e0)
        .fold(f64::NEG_INFINITY, f64::max);
    let dissipation_monotone = out.series.windows(2).all(|w| w[1].dissipation >= w[0].dissipation)
        && out.series.iter().all(|r| r.dissipation >= 0.0);
    let rows = lock.rows;
    let trajectory = lock.trajectory.unwrap_or_default();
    let summary = RunSummary {
        eps,
        steps: out.steps,
        t_final: config.t_final,
        initial_energy: e0,
        density_sup: lock.density_sup,
        relative_energy_initial: rows.first().map_or(0.0, |r| r.relative_energy),
        relative_energy_final: budget.relative_energy,
        velocity_error_final: rows.last().map_or(0.0, |r| r.velocity_error),
        energy_excess,
        dissipation_monotone,
        budget,
        weak,
        coercivity: lock.worst_coercivity.expect("at least one output"),
        corrector_triple_norm: lock.corrector.0,
        corrector_relation: lock.corrector.1,
        floor_clamps: out.series.iter().map(|r| r.floor_clamps).sum(),
    };
    Ok(RunRecord {
        summary,
        rows,
        final_state: out.final_state,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::PerturbationSpec;
    use crate::target::TargetInit;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::default_preset();
        c.grid.nh = 16;
        c.grid.nv = 4;
        c.scaling.eps = vec![0.5];
        c.t_final = 0.05;
        c.output_every = 0.025;
        c
    }

    #[test]
    fn anchor_run_stays_at_rest() {
        let mut c = small();
        c.target = TargetInit::Rest;
        c.perturbation = PerturbationSpec::off();
        let r = run_single(&c, 0.5, RunOptions::default()).unwrap();
        let s = &r.summary;
        assert!(s.density_sup < 1e-12, "{}", s.density_sup);
        assert!(s.relative_energy_final < 1e-20);
        assert_eq!(s.budget.terms[6], 0.0);
        assert_eq!(r.rows.len(), 3);
        assert!(s.weak.as_ref().unwrap().max_momentum() < 1e-11);
    }

    #[test]
    fn small_run_is_energy_stable() {
        let c = small();
        let r = run_single(&c, 0.5, RunOptions::default()).unwrap();
        let s = &r.summary;
        assert!(s.energy_excess <= 1e-10, "{}", s.energy_excess);
        assert!(s.dissipation_monotone);
        assert!(s.coercivity.holds);
        assert!(s.budget.terms.iter().all(|t| t.is_finite()));
        assert!(rows_csv(&r.rows).lines().count() == 4);
    }
}
