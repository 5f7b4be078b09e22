//! The eight terms of the relative energy inequality for the test pair
//! `(rho_tilde + eps^m q, (v_h, 0))`, accumulated step by step with the
//! trapezoid rule:
//!
//! ```text
//! L1 = E(0)
//! L2 = -int int (m - rho v) . (d_t v + (v . grad) v)
//! L3 = -int int ((m - rho v) (x) (m - rho v) / rho) : grad v
//! L4 = eps^-m int int (rho_test - rho) P''(rho_test) d_t q
//! L5 = -eps^-m int int m . grad q (P''(rho_test) - 1)
//! L6 = -eps^-2m int int m . (P''(rho_test) - P''(rho_tilde)) grad rho_tilde
//! L7 = -eps^-2n int int (rho - rho_test) grad G . u_test
//! L8 = continuity residual against phi - momentum residual against u_test
//! ```
//!
//! The `1` in `L5` is the Coriolis coefficient, which equals `P''(1)` for a
//! normalized pressure law. `phi = |v|^2 / 2 + eps^-2m (P'(rho_tilde) - P'(rho_test))`
//! is the multiplier of `rho` in `E - E_total + int m . u_test`. With viscosity the pairing
//! `eps^alpha int int S(grad u) : grad u_test` joins the right-hand side and
//! the viscous dissipation the left.

use serde::Serialize;

use super::relative_energy::{relative_energy, RelativeEnergyReport};
use crate::domain::State;
use crate::eos::{Cutoff, EosParams};
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::solver::{stress_field, SeriesRow, VACUUM_FLOOR};
use crate::statics::StaticProfile;
use crate::target::TargetFrame;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetReport {
    pub time: f64,
    /// `L1 ... L8`.
    pub terms: [f64; 8],
    pub viscous_pairing: f64,
    /// `E(tau)`.
    pub relative_energy: f64,
    /// `int_0^tau E dt`.
    pub integrated_energy: f64,
    /// `sup_t ||grad_h v_h||_inf` (Frobenius).
    pub grad_v_sup: f64,
    /// `grad_v_sup * integrated_energy`, the bound on `|L3|`.
    pub l3_bound: f64,
    /// `E_0 - E(tau) - dissipation`.
    pub energy_defect: f64,
    pub viscous_dissipation: f64,
    /// `E(tau) + defect + dissipation - sum L - viscous pairing`.
    pub closure: f64,
    /// `E(0) + c int E + c int defect` with `c = max(1, grad_v_sup)`.
    pub gronwall_bound: f64,
}

impl BudgetReport {
    pub fn sum(&self) -> f64 {
        self.terms.iter().sum::<f64>() + self.viscous_pairing
    }

    pub fn l3_within_bound(&self) -> bool {
        self.terms[2].abs() <= self.l3_bound
    }
}

/// Per-instant integrands: `L2..L7` densities, the momentum flux pairing,
/// the viscous pairing, `E` and the continuity flux pairing against `phi`.
const SLOTS: usize = 10;

#[derive(Debug, Clone)]
struct Instant {
    time: f64,
    values: [f64; SLOTS],
    mom_pairing: f64,
    mass_pairing: f64,
    report: RelativeEnergyReport,
}

pub struct BudgetAccumulator {
    scaling: ScalingParams,
    eos: EosParams,
    chi: Cutoff,
    profile: StaticProfile,
    viscosity: Option<ViscosityParams>,
    first: Option<Instant>,
    last: Option<Instant>,
    sums: [f64; SLOTS],
    defect_integral: f64,
    last_defect: Option<(f64, f64)>,
    grad_v_sup: f64,
}

impl BudgetAccumulator {
    pub fn new(
        profile: &StaticProfile,
        scaling: &ScalingParams,
        eos: &EosParams,
        chi: &Cutoff,
        viscosity: Option<&ViscosityParams>,
    ) -> Self {
        BudgetAccumulator {
            scaling: *scaling,
            eos: *eos,
            chi: *chi,
            profile: profile.clone(),
            viscosity: viscosity.filter(|_| scaling.viscous_coeff() > 0.0).copied(),
            first: None,
            last: None,
            sums: [0.0; SLOTS],
            defect_integral: 0.0,
            last_defect: None,
            grad_v_sup: 0.0,
        }
    }

    fn instant(&self, state: &State, frame: &TargetFrame) -> Result<Instant> {
        let grid = state.grid;
        if frame.time != state.time {
            return Err(Error::TimeGrid(format!(
                "target frame at t = {} paired with state at t = {}",
                frame.time, state.time
            )));
        }
        if frame.v[0].len() != grid.layer() || self.profile.nv() != grid.nv {
            return Err(Error::Shape {
                expected: grid.layer(),
                found: frame.v[0].len(),
            });
        }
        let s = &self.scaling;
        let mach = s.eps.powf(s.m);
        let inv_mach = s.inv_mach();
        let pc = s.pressure_coeff();
        let gc = s.gravity_coeff();
        let cc = s.coriolis_coeff();
        let vc = s.viscous_coeff();
        let q = &frame.corrector;
        let stress = match &self.viscosity {
            Some(v) => Some(stress_field(state, v)?.0),
            None => None,
        };
        let n = grid.len();
        let mut rho_test = vec![0.0; n];
        let mut u_test = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut acc = [0.0; SLOTS];
        let mut mom_pairing = 0.0;
        let mut mass_pairing = 0.0;
        for k in 0..grid.nv {
            let rt = self.profile.centers[k];
            let drt = self.profile.gradient[k];
            let d2_static = self.eos.d2potential(rt);
            let d1_static = self.eos.dpotential(rt);
            let p_static = self.eos.p(rt);
            for h in 0..grid.layer() {
                let c = k * grid.layer() + h;
                let rho = state.rho[c];
                let m = [state.mom[0][c], state.mom[1][c], state.mom[2][c]];
                let v = [frame.v[0][h], frame.v[1][h]];
                let gv = [[frame.grad_v[0][0][h], frame.grad_v[0][1][h]], [frame.grad_v[1][0][h], frame.grad_v[1][1][h]]];
                let r = rt + mach * q.q[h];
                rho_test[c] = r;
                u_test[0][c] = v[0];
                u_test[1][c] = v[1];
                let d2 = self.eos.d2potential(r);
                let w = [m[0] - rho * v[0], m[1] - rho * v[1]];
                // L2
                acc[0] -= w[0] * frame.accel[0][h] + w[1] * frame.accel[1][h];
                // L3
                let (mut conv_rel, mut conv) = (0.0, 0.0);
                if rho > VACUUM_FLOOR {
                    for a in 0..2 {
                        for b in 0..2 {
                            conv_rel += w[a] * w[b] / rho * gv[a][b];
                            conv += m[a] * m[b] / rho * gv[a][b];
                        }
                    }
                }
                acc[1] -= conv_rel;
                // L4
                acc[2] += inv_mach * (r - rho) * d2 * q.dq_dt[h];
                // L5
                acc[3] -= inv_mach * (m[0] * q.grad_q[0][h] + m[1] * q.grad_q[1][h]) * (d2 - 1.0);
                // L6
                acc[4] -= pc * m[2] * (d2 - d2_static) * drt;
                // L7 with grad G = (0, 0, -1)
                acc[5] -= gc * (rho - r) * (-u_test[2][c]);
                // momentum flux pairing against u_test
                let div = gv[0][0] + gv[1][1];
                let mut flux = m[0] * frame.dv_dt[0][h] + m[1] * frame.dv_dt[1][h] + conv + pc * (self.eos.p(rho) - p_static) * div
                    - cc * (m[0] * v[1] - m[1] * v[0]);
                if let Some(s6) = &stress {
                    let sg = s6[0][c] * gv[0][0] + s6[1][c] * gv[1][1] + s6[3][c] * (gv[0][1] + gv[1][0]);
                    acc[7] += vc * sg;
                    flux -= vc * sg;
                }
                acc[6] += flux;
                mom_pairing += m[0] * v[0] + m[1] * v[1];
                // continuity against phi
                let phi = 0.5 * (v[0] * v[0] + v[1] * v[1]) + pc * (d1_static - self.eos.dpotential(r));
                let dphi_dt = v[0] * frame.dv_dt[0][h] + v[1] * frame.dv_dt[1][h] - inv_mach * d2 * q.dq_dt[h];
                let grad_phi = [
                    v[0] * gv[0][0] + v[1] * gv[1][0] - inv_mach * d2 * q.grad_q[0][h],
                    v[0] * gv[0][1] + v[1] * gv[1][1] - inv_mach * d2 * q.grad_q[1][h],
                    pc * (d2_static - d2) * drt,
                ];
                acc[9] += rho * dphi_dt + m[0] * grad_phi[0] + m[1] * grad_phi[1] + m[2] * grad_phi[2];
                mass_pairing += rho * phi;
            }
        }
        let dv = grid.cell_volume();
        for i in (0..8).chain([9]) {
            acc[i] *= dv;
        }
        let report = relative_energy(state, &rho_test, &u_test, s, &self.eos, &self.chi)?;
        acc[8] = report.total;
        Ok(Instant {
            time: state.time,
            values: acc,
            mom_pairing: mom_pairing * dv,
            mass_pairing: mass_pairing * dv,
            report,
        })
    }

    /// Adds the state at the next time level together with the target frame
    /// at the same instant.
    pub fn push(&mut self, state: &State, frame: &TargetFrame) -> Result<()> {
        let now = self.instant(state, frame)?;
        self.grad_v_sup = self.grad_v_sup.max(frame.grad_v_sup());
        if let Some(prev) = &self.last {
            let h = now.time - prev.time;
            if !(h > 0.0) {
                return Err(Error::TimeGrid(format!("state at t = {} does not follow t = {}", now.time, prev.time)));
            }
            for i in 0..SLOTS {
                self.sums[i] += 0.5 * h * (prev.values[i] + now.values[i]);
            }
        } else {
            self.first = Some(now.clone());
        }
        self.last = Some(now);
        Ok(())
    }

    /// Relative energy at the last pushed instant.
    pub fn current(&self) -> Option<&RelativeEnergyReport> {
        self.last.as_ref().map(|i| &i.report)
    }

    /// Feeds the energy series; rows must arrive at pushed instants.
    pub fn record_defect(&mut self, row: &SeriesRow) {
        if let Some((t, d)) = self.last_defect {
            if row.t > t {
                self.defect_integral += 0.5 * (row.t - t) * (d + row.defect);
            }
        }
        self.last_defect = Some((row.t, row.defect));
    }

    /// Budget at the last pushed instant, closed with the energy series row
    /// taken at that instant.
    pub fn report(&self, row: &SeriesRow) -> Result<BudgetReport> {
        let (Some(first), Some(last)) = (&self.first, &self.last) else {
            return Err(Error::Insufficient("budget has no states".into()));
        };
        if row.t != last.time {
            return Err(Error::TimeGrid(format!(
                "energy row at t = {} but budget at t = {}",
                row.t, last.time
            )));
        }
        let continuity = (last.mass_pairing - first.mass_pairing) - self.sums[9];
        let l8 = continuity - ((last.mom_pairing - first.mom_pairing) - self.sums[6]);
        let terms = [
            first.values[8],
            self.sums[0],
            self.sums[1],
            self.sums[2],
            self.sums[3],
            self.sums[4],
            self.sums[5],
            l8,
        ];
        let viscous_pairing = self.sums[7];
        let integrated_energy = self.sums[8];
        let rel = last.values[8];
        let c = self.grad_v_sup.max(1.0);
        let out = BudgetReport {
            time: last.time,
            terms,
            viscous_pairing,
            relative_energy: rel,
            integrated_energy,
            grad_v_sup: self.grad_v_sup,
            l3_bound: self.grad_v_sup * integrated_energy,
            energy_defect: row.defect,
            viscous_dissipation: row.dissipation,
            closure: 0.0,
            gronwall_bound: first.values[8] + c * integrated_energy + c * self.defect_integral,
        };
        Ok(BudgetReport {
            closure: rel + row.defect + row.dissipation - out.sum(),
            ..out
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SlabGrid;
    use crate::statics::static_density;
    use crate::target::{Spectral, TargetInit, TargetState};
    use std::f64::consts::PI;

    fn row(t: f64) -> SeriesRow {
        SeriesRow {
            t,
            dt: 0.0,
            mass: 0.0,
            energy: 0.0,
            dissipation: 0.0,
            defect: 0.0,
            max_speed: 0.0,
            floor_clamps: 0,
        }
    }

    #[test]
    fn anchor_against_rest_is_all_zero() {
        let grid = SlabGrid::new(2.0 * PI, 8, 4).unwrap();
        let s = ScalingParams::new(0.4, 3.0, 1.0).unwrap();
        let eos = EosParams::default();
        let p = static_density(&s, &eos, &grid).unwrap();
        let mut b = BudgetAccumulator::new(&p, &s, &eos, &Cutoff::default(), None);
        for n in 0..5 {
            let t = 0.1 * n as f64;
            let z = vec![0.0; grid.len()];
            let st = State::new(grid, p.field(&grid), [z.clone(), z.clone(), z], t).unwrap();
            b.push(&st, &TargetFrame::rest(8, t, &s)).unwrap();
        }
        let r = b.report(&row(0.4)).unwrap();
        assert_eq!(r.terms, [0.0; 8]);
        assert_eq!(r.closure, 0.0);
        assert!(r.l3_within_bound());
    }

    #[test]
    fn l7_vanishes_for_any_state() {
        let grid = SlabGrid::new(2.0 * PI, 16, 4).unwrap();
        let s = ScalingParams::new(0.5, 3.0, 1.0).unwrap();
        let eos = EosParams::default();
        let p = static_density(&s, &eos, &grid).unwrap();
        let sp = Spectral::new(16, 2.0 * PI);
        let tgt = TargetState::from_init(&sp, &TargetInit::default()).unwrap();
        let frame = TargetFrame::new(&sp, &tgt, &s).unwrap();
        let mut b = BudgetAccumulator::new(&p, &s, &eos, &Cutoff::default(), None);
        let rho = grid.sample(|x, y, z| 1.0 + 0.2 * (x + 2.0 * y).sin() * z);
        let m = [grid.sample(|x, _, _| x.cos()), grid.sample(|_, y, _| y.sin()), grid.sample(|x, _, z| x.sin() * z * (1.0 - z))];
        let st = State::new(grid, rho, m, 0.0).unwrap();
        b.push(&st, &frame).unwrap();
        let mut f2 = frame.clone();
        f2.time = 0.1;
        let mut st2 = st.clone();
        st2.time = 0.1;
        st2.rho[5] *= 1.5;
        b.push(&st2, &f2).unwrap();
        let r = b.report(&row(0.1)).unwrap();
        assert_eq!(r.terms[6], 0.0);
        assert!(r.terms.iter().all(|t| t.is_finite()));
    }

    #[test]
    fn misaligned_frame_is_rejected() {
        let grid = SlabGrid::new(2.0 * PI, 8, 4).unwrap();
        let s = ScalingParams::new(0.4, 3.0, 1.0).unwrap();
        let eos = EosParams::default();
        let p = static_density(&s, &eos, &grid).unwrap();
        let mut b = BudgetAccumulator::new(&p, &s, &eos, &Cutoff::default(), None);
        let st = State::uniform(grid, 1.0, [0.0; 3]).unwrap();
        assert!(matches!(b.push(&st, &TargetFrame::rest(8, 0.5, &s)), Err(Error::TimeGrid(_))));
        b.push(&st, &TargetFrame::rest(8, 0.0, &s)).unwrap();
        assert!(matches!(b.report(&row(1.0)), Err(Error::TimeGrid(_))));
    }
}
