use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::config::{ExperimentConfig, Mode};
use super::fit::{fit_rate, RateFit};
use super::simulation::{run_single, OutputRow, RunOptions, RunRecord, RunSummary};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsEntry {
    pub eps: f64,
    pub steps: usize,
    pub density_sup: f64,
    pub relative_energy_final: f64,
    pub velocity_error_final: f64,
    pub energy_excess: f64,
    /// `(t, E(t))` at every output time.
    pub checkpoints: Vec<(f64, f64)>,
}

impl EpsEntry {
    pub fn new(s: &RunSummary, rows: &[OutputRow]) -> Self {
        EpsEntry {
            eps: s.eps,
            steps: s.steps,
            density_sup: s.density_sup,
            relative_energy_final: s.relative_energy_final,
            velocity_error_final: s.velocity_error_final,
            energy_excess: s.energy_excess,
            checkpoints: rows.iter().map(|r| (r.t, r.relative_energy)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub mode: Mode,
    pub m: f64,
    pub entries: Vec<EpsEntry>,
    pub density_fit: Option<RateFit>,
    pub energy_fit: Option<RateFit>,
    pub velocity_fit: Option<RateFit>,
    pub notes: Vec<String>,
    /// Eps values at which `E(T)` failed to decrease from the previous eps.
    pub non_monotone_eps: Vec<f64>,
    /// Runs that aborted, with the error.
    pub failed_runs: Vec<(f64, String)>,
    pub complete: bool,
    pub checks: Vec<Check>,
}

impl ConvergenceReport {
    pub fn all_passed(&self) -> bool {
        self.complete && self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: ConvergenceReport,
    /// Completed runs in config order.
    pub runs: Vec<RunRecord>,
}

fn fit_or_note(name: &str, pairs: &[(f64, f64)], notes: &mut Vec<String>) -> Option<RateFit> {
    if pairs.len() < 3 {
        notes.push(format!("{name}: insufficient points ({})", pairs.len()));
        return None;
    }
    if pairs.iter().all(|p| p.1 == 0.0) {
        notes.push(format!("{name}: zero data, fit skipped"));
        return None;
    }
    match fit_rate(pairs) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Assembles the report from completed runs (in decreasing eps order).
pub fn assess(config: &ExperimentConfig, records: &[RunRecord], failed: Vec<(f64, String)>) -> ConvergenceReport {
    let th = &config.thresholds;
    let m = config.scaling.m;
    let runs: Vec<&RunSummary> = records.iter().map(|r| &r.summary).collect();
    let entries: Vec<EpsEntry> = records.iter().map(|r| EpsEntry::new(&r.summary, &r.rows)).collect();
    let mut notes = Vec::new();
    let pairs = |f: fn(&EpsEntry) -> f64| entries.iter().map(|e| (e.eps, f(e))).collect::<Vec<_>>();
    let density_fit = fit_or_note("density", &pairs(|e| e.density_sup), &mut notes);
    let energy_fit = fit_or_note("relative energy", &pairs(|e| e.relative_energy_final), &mut notes);
    let velocity_fit = fit_or_note("velocity error", &pairs(|e| e.velocity_error_final), &mut notes);
    let non_monotone_eps: Vec<f64> = entries
        .windows(2)
        .filter(|w| !(w[1].relative_energy_final < w[0].relative_energy_final))
        .map(|w| w[1].eps)
        .collect();

    let mut checks = Vec::new();
    if !runs.is_empty() {
        let worst = runs.iter().map(|s| s.energy_excess).fold(f64::NEG_INFINITY, f64::max);
        let monotone = runs.iter().all(|s| s.dissipation_monotone);
        checks.push(check(
            "energy-inequality",
            worst <= th.energy_tolerance && monotone,
            format!("max (E + D - E0)/E0 = {worst:.3e}, dissipation monotone: {monotone}"),
        ));
        let l7 = runs.iter().all(|s| s.budget.terms[6] == 0.0);
        let l3 = runs.iter().all(|s| s.budget.l3_within_bound());
        let closure = runs
            .iter()
            .map(|s| s.budget.closure.abs() / s.budget.relative_energy.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let closure_ok = runs
            .iter()
            .all(|s| s.budget.closure.abs() <= th.closure * s.budget.relative_energy || s.budget.closure == 0.0);
        checks.push(check(
            "budget",
            l7 && l3 && closure_ok,
            format!("L7 = 0: {l7}, |L3| within bound: {l3}, worst |closure|/E(T) = {closure:.3e}"),
        ));
        let coercive = runs.iter().all(|s| s.coercivity.holds);
        let ratio = runs.iter().map(|s| s.coercivity.worst_ratio).fold(0.0, f64::max);
        checks.push(check(
            "coercivity",
            coercive,
            format!("worst term/total = {ratio:.3}"),
        ));
        if runs.iter().all(|s| s.weak.is_some()) {
            let worst = runs
                .iter()
                .map(|s| s.weak.as_ref().map_or(0.0, |w| w.defect_min / s.initial_energy))
                .fold(f64::INFINITY, f64::min);
            checks.push(check(
                "energy-defect",
                worst >= -th.energy_tolerance,
                format!("min defect / E0 = {worst:.3e}"),
            ));
        }
    }
    if entries.len() >= 2 {
        let (a, b) = (&entries[0], &entries[entries.len() - 1]);
        if let Some(f) = &density_fit {
            let need = (a.eps / b.eps).powf(m - 1.0);
            let got = a.density_sup / b.density_sup;
            checks.push(check(
                "density-rate",
                f.slope >= m - th.density_slope_slack && got >= need,
                format!(
                    "slope {:.3} +- {:.3} (need >= {:.3}), reduction {:.3} (need >= {:.3})",
                    f.slope,
                    f.stderr,
                    m - th.density_slope_slack,
                    got,
                    need
                ),
            ));
        }
        if energy_fit.is_some() || entries.len() >= 2 {
            let ratio = b.relative_energy_final / a.relative_energy_final;
            checks.push(check(
                "relative-energy-decay",
                non_monotone_eps.is_empty() && ratio <= th.energy_ratio,
                format!(
                    "E(T) ratio {:.4} (need <= {}), non-monotone at {:?}",
                    ratio, th.energy_ratio, non_monotone_eps
                ),
            ));
            let vdec = entries.windows(2).all(|w| w[1].velocity_error_final < w[0].velocity_error_final);
            checks.push(check(
                "velocity-error-decay",
                vdec,
                format!(
                    "L1loc errors {:?}",
                    entries.iter().map(|e| e.velocity_error_final).collect::<Vec<_>>()
                ),
            ));
        }
    }
    ConvergenceReport {
        mode: config.mode,
        m,
        entries,
        density_fit,
        energy_fit,
        velocity_fit,
        notes,
        non_monotone_eps,
        complete: failed.is_empty(),
        failed_runs: failed,
        checks,
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs every eps of the config (on a bounded worker pool) and assesses the
/// family.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    run_sweep_with(config, RunOptions::default())
}

pub fn run_sweep_with(config: &ExperimentConfig, options: RunOptions) -> Result<SweepOutcome> {
    config.validate()?;
    let eps = &config.scaling.eps;
    let results: Mutex<Vec<Option<Result<RunRecord>>>> = Mutex::new((0..eps.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers().min(eps.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= eps.len() {
                    break;
                }
                let r = run_single(config, eps[i], options);
                results.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    let mut runs = Vec::new();
    let mut failed = Vec::new();
    for (i, r) in results.into_inner().expect("no poisoned workers").into_iter().enumerate() {
        match r.expect("every index is visited") {
            Ok(rec) => runs.push(rec),
            Err(e) => {
                log::error!("run at eps = {} aborted: {e}", eps[i]);
                failed.push((eps[i], e.to_string()));
            }
        }
    }
    let report = assess(config, &runs, failed);
    Ok(SweepOutcome { report, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::PerturbationSpec;
    use crate::target::TargetInit;

    fn tiny() -> ExperimentConfig {
        let mut c = ExperimentConfig::default_preset();
        c.grid.nh = 16;
        c.grid.nv = 4;
        c.t_final = 0.02;
        c.output_every = 0.01;
        c.scaling.eps = vec![0.8, 0.7, 0.6];
        c.diagnostics.weak_residuals = false;
        c
    }

    #[test]
    fn single_eps_has_no_slopes() {
        let mut c = tiny();
        c.scaling.eps = vec![0.8];
        let out = run_sweep(&c).unwrap();
        let r = &out.report;
        assert!(r.density_fit.is_none() && r.energy_fit.is_none());
        assert!(r.notes.iter().any(|n| n.contains("insufficient points")));
        assert!(r.check("density-rate").is_none());
    }

    #[test]
    fn anchor_sweep_skips_fits_on_zero_data() {
        let mut c = tiny();
        c.target = TargetInit::Rest;
        c.perturbation = PerturbationSpec::off();
        let out = run_sweep(&c).unwrap();
        let r = &out.report;
        assert_eq!(out.runs.len(), 3);
        for e in &r.entries {
            assert!(e.density_sup < 1e-12);
        }
        assert!(r.notes.iter().any(|n| n.contains("zero data")) || r.density_fit.is_none());
        assert!(r.check("energy-inequality").unwrap().passed);
    }

    #[test]
    fn failed_run_marks_report_incomplete() {
        let c = tiny();
        let s = run_sweep(&c).unwrap();
        let r = assess(&c, &s.runs[..2], vec![(0.6, "boom".into())]);
        assert!(!r.complete);
        assert!(!r.all_passed());
    }

    #[test]
    fn exact_power_law_density_gives_slope_m() {
        let c = tiny();
        let mut runs = run_sweep(&c).unwrap().runs;
        for r in &mut runs {
            r.summary.density_sup = r.summary.eps.powf(c.scaling.m);
        }
        let r = assess(&c, &runs, Vec::new());
        let f = r.density_fit.unwrap();
        assert!((f.slope - c.scaling.m).abs() < 1e-12, "{}", f.slope);
    }
}
