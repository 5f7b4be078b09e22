use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slabflow::diagnostics::{default_suite, weak_residuals};
use slabflow::domain::{read_snapshot, write_snapshot, Snapshot, State};
use slabflow::harness::{
    assess, build_profile, emit_artifacts, run_single, run_sweep_with, ConvergenceReport, ExperimentConfig, Mode,
    RunOptions,
};
use slabflow::target::{write_spectral, TargetSolver};
use slabflow::{Error, Result};

#[derive(Parser)]
#[command(name = "slabflow", version, about = "Rotating stratified low-Mach flow on a slab: runs, sweeps and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment config; defaults to the built-in preset for the mode.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// euler or ns.
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// One eps-run with a stored trajectory.
    Run {
        #[command(flatten)]
        common: Common,
        /// Eps value; defaults to the first in the config.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// The full eps family with rate fits and plots.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Skip the weak-residual monitor.
        #[arg(long)]
        no_weak: bool,
    },
    /// Static density profiles, one CSV per eps.
    Statics {
        #[command(flatten)]
        common: Common,
    },
    /// Target-only run.
    Target {
        #[command(flatten)]
        common: Common,
    },
    /// Weak residuals of a trajectory stored by `run`.
    Audit {
        /// Run directory written by `run`.
        dir: PathBuf,
    },
}

fn resolve(c: &Common) -> Result<(ExperimentConfig, Option<String>)> {
    let (mut cfg, raw) = match &c.config {
        Some(p) => {
            let (cfg, raw) = ExperimentConfig::load(p)?;
            (cfg, Some(raw))
        }
        None => (ExperimentConfig::preset(if c.mode == Some(Mode::NavierStokes) { "ns" } else { "default" })?, None),
    };
    if let Some(m) = c.mode {
        cfg = cfg.with_mode(m);
    }
    if let Some(s) = c.seed {
        cfg = cfg.with_seed(s);
    }
    cfg.validate()?;
    // overrides invalidate the verbatim echo
    let raw = raw.filter(|_| c.mode.is_none() && c.seed.is_none());
    Ok((cfg, raw))
}

fn print_report(r: &ConvergenceReport) {
    for e in &r.entries {
        println!(
            "eps {:<6} steps {:>6}  density {:.4e}  E(T) {:.4e}  velocity error {:.4e}",
            e.eps, e.steps, e.density_sup, e.relative_energy_final, e.velocity_error_final
        );
    }
    for (name, f) in [("density", &r.density_fit), ("relative energy", &r.energy_fit), ("velocity error", &r.velocity_fit)] {
        if let Some(f) = f {
            println!("{name} slope {:.3} +- {:.3}", f.slope, f.stderr);
        }
    }
    for n in &r.notes {
        println!("note: {n}");
    }
    for (eps, e) in &r.failed_runs {
        println!("run at eps = {eps} aborted: {e}");
    }
    for c in &r.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

fn verdict(r: &ConvergenceReport) -> ExitCode {
    if r.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn eps_record(cfg: &ExperimentConfig, eps: f64) -> [f64; 3] {
    [eps, cfg.scaling.m, cfg.scaling.n]
}

fn run_cmd(c: &Common, eps: Option<f64>) -> Result<ExitCode> {
    let (mut cfg, raw) = resolve(c)?;
    let eps = eps.unwrap_or(cfg.scaling.eps[0]);
    cfg.scaling.eps = vec![eps];
    let raw = raw.filter(|_| cfg.scaling.eps.len() == 1);
    let rec = run_single(
        &cfg,
        eps,
        RunOptions {
            keep_trajectory: true,
            ..Default::default()
        },
    )?;
    let dir = c.out.join("trajectory");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (i, s) in rec.trajectory.iter().enumerate() {
        write_snapshot(&dir.join(format!("{i:05}.snap")), &Snapshot::from_state(s, Some(eps_record(&cfg, eps))))?;
    }
    let runs = [rec];
    let report = assess(&cfg, &runs, Vec::new());
    emit_artifacts(&c.out, &cfg, raw.as_deref(), &report, &runs)?;
    print_report(&report);
    Ok(verdict(&report))
}

fn sweep_cmd(c: &Common, no_weak: bool) -> Result<ExitCode> {
    let (cfg, raw) = resolve(c)?;
    let out = run_sweep_with(
        &cfg,
        RunOptions {
            weak_residuals: no_weak.then_some(false),
            ..Default::default()
        },
    )?;
    emit_artifacts(&c.out, &cfg, raw.as_deref(), &out.report, &out.runs)?;
    print_report(&out.report);
    Ok(verdict(&out.report))
}

fn statics_cmd(c: &Common) -> Result<ExitCode> {
    let (cfg, _) = resolve(c)?;
    let dir = c.out.join("statics");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for &eps in &cfg.scaling.eps {
        let p = build_profile(&cfg, eps)?;
        p.write_csv(&dir.join(format!("eps_{eps}.csv")))?;
        println!(
            "eps {eps}: k = {:.4e}, deviation {:.4e}, residual {:.3e}",
            p.stratification,
            p.deviation(),
            p.residual_norm
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn target_cmd(c: &Common) -> Result<ExitCode> {
    let (cfg, _) = resolve(c)?;
    let mut t = TargetSolver::new(cfg.grid.nh, cfg.grid.length, &cfg.target, cfg.solver.target_max_dt)?;
    fs::create_dir_all(&c.out).map_err(|e| Error::io(&c.out, e))?;
    let mut csv = String::from("t,energy,enstrophy,max_speed,divergence_max\n");
    let n = (cfg.t_final / cfg.output_every).ceil().max(1.0) as usize;
    for i in 0..=n {
        let time = (i as f64 * cfg.output_every).min(cfg.t_final);
        t.advance_to(time)?;
        let sp = &t.spectral;
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e}\n",
            time,
            t.state.energy(sp),
            t.state.enstrophy(sp),
            t.state.max_speed(),
            t.state.divergence_max(sp)
        ));
    }
    let path = c.out.join("target_series.csv");
    fs::write(&path, &csv).map_err(|e| Error::io(&path, e))?;
    write_spectral(&c.out.join("target_final.snap"), &t.spectral, &t.state)?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}

fn audit_cmd(dir: &Path) -> Result<ExitCode> {
    let (cfg, _) = ExperimentConfig::load(&dir.join("config.toml"))?;
    let tdir = dir.join("trajectory");
    let mut files: Vec<PathBuf> = fs::read_dir(&tdir)
        .map_err(|e| Error::io(&tdir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "snap"))
        .collect();
    files.sort();
    let mut states: Vec<State> = Vec::with_capacity(files.len());
    let mut eps = cfg.scaling.eps[0];
    for f in &files {
        let s = read_snapshot(f)?;
        if let Some(r) = s.header.eps_record {
            eps = r[0];
        }
        states.push(s.to_state()?);
    }
    if states.len() < 2 {
        return Err(Error::Insufficient(format!("{} holds fewer than two snapshots", tdir.display())));
    }
    let profile = build_profile(&cfg, eps)?;
    let rep = weak_residuals(
        &states,
        default_suite(),
        &profile,
        &cfg.scaling_for(eps)?,
        &cfg.eos,
        cfg.viscosity().as_ref(),
    )?;
    let path = dir.join("audit.json");
    let text = serde_json::to_string_pretty(&rep).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    println!(
        "eps {eps}: {} snapshots to t = {}, max continuity residual {:.4e}, max momentum residual {:.4e}",
        states.len(),
        rep.time,
        rep.max_continuity(),
        rep.max_momentum()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Run { common, eps } => run_cmd(common, *eps),
        Command::Sweep { common, no_weak } => sweep_cmd(common, *no_weak),
        Command::Statics { common } => statics_cmd(common),
        Command::Target { common } => target_cmd(common),
        Command::Audit { dir } => audit_cmd(dir),
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
