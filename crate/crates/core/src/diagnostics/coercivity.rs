use serde::Serialize;

use super::relative_energy::RelativeEnergyReport;

/// Single constant `C` with `term_i <= C * total` for each of the four
/// lower-bound groups.
///
/// Calibrated by a dense pointwise scan (`a = 0.5`, `gamma` in `[1.4, 3]`,
/// `eps^-2m >= 1`, reference density in `[0.75, 1.25]`, `|u_ref| <= 2`,
/// `|u| <= 4`, `rho` in `[0, 10]`) whose worst ratio is about 14.9, then
/// rounded up with headroom. Because each integrand obeys the bound
/// pointwise, so do the integrals.
pub const COERCIVITY_CONSTANT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityCheck {
    pub holds: bool,
    pub constant: f64,
    /// `C * total - term_i`; negative entries are violations.
    pub margins: [f64; 4],
    /// `max_i term_i / total` (0 for a vanishing report).
    pub worst_ratio: f64,
}

pub fn coercivity_check(report: &RelativeEnergyReport) -> CoercivityCheck {
    coercivity_check_with(report, COERCIVITY_CONSTANT)
}

pub fn coercivity_check_with(report: &RelativeEnergyReport, constant: f64) -> CoercivityCheck {
    let terms = report.bound_terms();
    let margins = terms.map(|t| constant * report.total - t);
    let worst_ratio = if report.total > 0.0 {
        terms.iter().fold(0.0f64, |a, t| a.max(t / report.total))
    } else if terms.iter().all(|&t| t == 0.0) {
        0.0
    } else {
        f64::INFINITY
    };
    CoercivityCheck {
        holds: margins.iter().all(|&m| m >= 0.0),
        constant,
        margins,
        worst_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{Cutoff, EosParams};

    #[test]
    fn vanishing_report_holds() {
        let c = coercivity_check(&RelativeEnergyReport::default());
        assert!(c.holds);
        assert_eq!(c.worst_ratio, 0.0);
    }

    #[test]
    fn pointwise_scan_stays_below_the_constant() {
        // coarser rerun of the calibration family
        let chi = Cutoff::default();
        let mut worst = 0.0f64;
        for gamma in [1.4, 2.0, 3.0] {
            let eos = EosParams::new(0.5, gamma).unwrap();
            for ir in 0..=400 {
                let rho = 10.0 * ir as f64 / 400.0;
                let x = chi.chi(rho);
                for jr in 0..=10 {
                    let r = 0.75 + 0.05 * jr as f64;
                    let b = eos.bregman(rho, r);
                    for iu in 0..=4 {
                        let ut = 0.5 * iu as f64;
                        for ju in 0..=40 {
                            let u = -4.0 + 0.2 * ju as f64;
                            let total = 0.5 * rho * (u - ut).powi(2) + b;
                            let terms = [
                                x * (u - ut).powi(2),
                                (1.0 - x) * rho * u * u,
                                x * (rho - r).powi(2),
                                (1.0 - x) * (1.0 + rho.powf(gamma)),
                            ];
                            if total > 0.0 {
                                for t in terms {
                                    worst = worst.max(t / total);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(worst > 10.0 && worst < COERCIVITY_CONSTANT, "{worst}");
    }

    #[test]
    fn violation_is_reported() {
        let r = RelativeEnergyReport {
            total: 1.0,
            ess_kinetic: 30.0,
            ..Default::default()
        };
        let c = coercivity_check(&r);
        assert!(!c.holds);
        assert!(c.margins[0] < 0.0);
        assert_eq!(c.worst_ratio, 30.0);
    }
}
