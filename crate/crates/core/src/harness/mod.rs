//! Experiment harness: configs, eps-sweeps, rate fits and artifacts.

mod artifacts;
mod config;
mod data;
mod fit;
mod simulation;
mod sweep;

pub use artifacts::{emit_artifacts, loglog_svg, series_name};
pub use config::{
    DiagnosticsSection, ExperimentConfig, GridSection, Mode, ScalingSection, SolverSection, Thresholds,
};
pub use data::{well_prepared_data, PerturbationSpec};
pub use fit::{fit_rate, RateFit};
pub use simulation::{build_profile, rows_csv, run_single, OutputRow, RunOptions, RunRecord, RunSummary};
pub use sweep::{assess, run_sweep, run_sweep_with, Check, ConvergenceReport, EpsEntry, SweepOutcome};
