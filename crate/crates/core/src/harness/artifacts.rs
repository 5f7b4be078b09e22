//! Run-directory layout:
//!
//! ```text
//! config.toml          config text, verbatim when loaded from a file
//! config.json          resolved config
//! series/eps_<e>.csv   one row per output time
//! summary.json         report and per-run summaries
//! plots/*.svg          log-log rate plots (sweeps with data only)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::fit::RateFit;
use super::simulation::{rows_csv, RunRecord, RunSummary};
use super::sweep::ConvergenceReport;
use crate::{Error, Result};

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    report: &'a ConvergenceReport,
    runs: Vec<&'a RunSummary>,
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn series_name(eps: f64) -> String {
    format!("eps_{eps}.csv")
}

/// Writes the run directory. `raw_config` is echoed verbatim when given.
/// Returns the written paths in emission order.
pub fn emit_artifacts(
    dir: &Path,
    config: &ExperimentConfig,
    raw_config: Option<&str>,
    report: &ConvergenceReport,
    runs: &[RunRecord],
) -> Result<Vec<PathBuf>> {
    mkdir(dir)?;
    let mut written = Vec::new();
    let toml_text = match raw_config {
        Some(t) => t.to_string(),
        None => config.to_toml()?,
    };
    write(dir.join("config.toml"), &toml_text, &mut written)?;
    write(dir.join("config.json"), &json(config)?, &mut written)?;
    if !runs.is_empty() {
        let series = dir.join("series");
        mkdir(&series)?;
        for r in runs {
            write(series.join(series_name(r.summary.eps)), &rows_csv(&r.rows), &mut written)?;
        }
    }
    let summary = Summary {
        seed: config.seed,
        report,
        runs: runs.iter().map(|r| &r.summary).collect(),
    };
    write(dir.join("summary.json"), &json(&summary)?, &mut written)?;
    if !report.entries.is_empty() {
        let plots = dir.join("plots");
        mkdir(&plots)?;
        let pick = |f: fn(&super::sweep::EpsEntry) -> f64| report.entries.iter().map(|e| (e.eps, f(e))).collect::<Vec<_>>();
        let figs = [
            ("density.svg", "sup_t density deviation", pick(|e| e.density_sup), report.density_fit),
            ("relative_energy.svg", "relative energy at T", pick(|e| e.relative_energy_final), report.energy_fit),
            ("velocity_error.svg", "L1loc velocity error at T", pick(|e| e.velocity_error_final), report.velocity_fit),
        ];
        for (name, title, pts, fit) in figs {
            write(plots.join(name), &loglog_svg(title, &pts, fit.as_ref()), &mut written)?;
        }
    }
    Ok(written)
}

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 60.0;

/// Log-log scatter of `(eps, value)` with the fitted line. Nonpositive
/// values are left out.
pub fn loglog_svg(title: &str, points: &[(f64, f64)], fit: Option<&RateFit>) -> String {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.log10(), p.1.log10()))
        .collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (-1.0, 0.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            let m = 0.08 * (hi - lo);
            (lo - m, hi + m)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 1.5 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 1.5 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        PAD / 2.0,
        W - 1.5 * PAD,
        H - 1.5 * PAD
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{:.3e}</text>"#,
            sx(v),
            H - PAD + 16.0,
            10f64.powf(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{:.3e}</text>"#,
            PAD - 4.0,
            sy(v) + 4.0,
            10f64.powf(v)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">eps (log)</text>"#, W / 2.0, H - 12.0);
    if let Some(f) = fit {
        let ln10 = std::f64::consts::LN_10;
        let line = |x: f64| (f.intercept + f.slope * x * ln10) / ln10;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-dasharray="6 3"/>"#,
            sx(x0),
            sy(line(x0).clamp(y0 - 10.0, y1 + 10.0)),
            sx(x1),
            sy(line(x1).clamp(y0 - 10.0, y1 + 10.0))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="steelblue">slope {:.3} +- {:.3}</text>"#,
            PAD + 8.0,
            PAD / 2.0 + 16.0,
            f.slope,
            f.stderr
        );
    }
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#, sx(*x), sy(*y));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{assess, fit_rate};

    #[test]
    fn empty_report_writes_config_and_summary_only() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig::default_preset();
        let r = assess(&c, &[], Vec::new());
        let files = emit_artifacts(dir.path(), &c, Some("# echo\n"), &r, &[]).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(fs::read_to_string(dir.path().join("config.toml")).unwrap(), "# echo\n");
        assert!(!dir.path().join("series").exists());
        assert!(!dir.path().join("plots").exists());
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(v["runs"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn svg_is_well_formed() {
        let pts = [(0.4, 0.064), (0.3, 0.027), (0.2, 0.008)];
        let f = fit_rate(&pts).unwrap();
        let s = loglog_svg("t", &pts, Some(&f));
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 3);
        assert!(s.contains("slope 3.000"));
        let s = loglog_svg("t", &[(0.4, 0.0)], None);
        assert_eq!(s.matches("<circle").count(), 0);
    }

    #[test]
    fn unwritable_directory_reports_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let c = ExperimentConfig::default_preset();
        let r = assess(&c, &[], Vec::new());
        let e = emit_artifacts(&blocker.join("sub"), &c, None, &r, &[]).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
        assert!(e.to_string().contains("file"));
    }
}
