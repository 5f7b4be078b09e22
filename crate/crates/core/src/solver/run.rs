use std::fmt::Write as _;

use serde::Serialize;

use super::step::{PrimitiveSolver, StepReport};
use crate::domain::State;
use crate::{Error, Result};

/// Receives every accepted state of a run, in order.
pub trait Observer {
    /// Called once with the initial state.
    fn start(&mut self, _state: &State) -> Result<()> {
        Ok(())
    }

    /// Called after each step with the new state.
    fn step(&mut self, state: &State, report: &StepReport) -> Result<()>;

    /// Called at each output time (including the final one).
    fn output(&mut self, _state: &State, _row: &SeriesRow) -> Result<()> {
        Ok(())
    }
}

/// One line of the energy time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub energy: f64,
    /// Cumulative viscous dissipation since `t = 0`.
    pub dissipation: f64,
    /// `E_0 - E(t) - dissipation(t)`; nonnegative for an energy-stable run.
    pub defect: f64,
    pub max_speed: f64,
    pub floor_clamps: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: State,
    pub series: Vec<SeriesRow>,
    pub steps: usize,
    pub initial_energy: f64,
}

impl RunOutput {
    pub fn series_csv(&self) -> String {
        series_csv(&self.series)
    }

    /// Most negative defect relative to `E_0` (0 when the run is energy stable).
    pub fn worst_defect(&self) -> f64 {
        self.series.iter().map(|r| r.defect).fold(0.0, f64::min)
    }
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut out = String::from("t,dt,mass,energy,dissipation,defect,max_speed,floor_clamps\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            r.t, r.dt, r.mass, r.energy, r.dissipation, r.defect, r.max_speed, r.floor_clamps
        );
    }
    out
}

/// Integrates from `initial.time` to `t_final`, landing exactly on every
/// multiple of `output_every` (or only on `t_final` when `None`).
pub fn run(
    solver: &PrimitiveSolver,
    initial: &State,
    t_final: f64,
    output_every: Option<f64>,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutput> {
    if !(t_final > initial.time) {
        return Err(Error::Parameter(format!(
            "final time {t_final} must exceed the start time {}",
            initial.time
        )));
    }
    if let Some(h) = output_every {
        if !(h > 0.0) {
            return Err(Error::Parameter(format!("output interval must be positive, got {h}")));
        }
    }
    let e0 = solver.energy(initial)?;
    let mut state = initial.clone();
    let first = SeriesRow {
        t: state.time,
        dt: 0.0,
        mass: state.total_mass(),
        energy: e0,
        dissipation: 0.0,
        defect: 0.0,
        max_speed: 0.0,
        floor_clamps: 0,
    };
    for o in observers.iter_mut() {
        o.start(&state)?;
        o.output(&state, &first)?;
    }
    let mut series = vec![first];
    let mut outputs = Vec::new();
    if let Some(h) = output_every {
        let mut j = 1usize;
        loop {
            let t = initial.time + j as f64 * h;
            if t >= t_final * (1.0 - 1e-12) {
                break;
            }
            outputs.push(t);
            j += 1;
        }
    }
    outputs.push(t_final);
    let mut next_out = 0usize;
    let mut dissipation = 0.0;
    let mut steps = 0usize;
    let mut clamps = 0usize;
    while next_out < outputs.len() {
        let target = outputs[next_out];
        let mut dt = solver.stable_dt(&state);
        let mut hit = false;
        if state.time + dt >= target * (1.0 - 1e-14) {
            dt = target - state.time;
            hit = true;
        }
        let (next, report) = solver.step(&state, dt)?;
        state = next;
        if hit {
            state.time = target;
        }
        steps += 1;
        dissipation += report.dissipation;
        clamps += report.floor_clamps;
        for o in observers.iter_mut() {
            o.step(&state, &report)?;
        }
        if hit {
            let row = SeriesRow {
                t: target,
                dt: report.dt,
                mass: report.total_mass,
                energy: report.total_energy,
                dissipation,
                defect: e0 - report.total_energy - dissipation,
                max_speed: report.max_wave_speed,
                floor_clamps: clamps,
            };
            for o in observers.iter_mut() {
                o.output(&state, &row)?;
            }
            series.push(row);
            next_out += 1;
        }
    }
    Ok(RunOutput {
        final_state: state,
        series,
        steps,
        initial_energy: e0,
    })
}
