use serde::Serialize;

use crate::domain::State;
use crate::eos::{split_exact, Cutoff, EosParams};
use crate::scaling::ScalingParams;
use crate::sum::Compensated;
use crate::{Error, Result};

/// Relative energy of a state with respect to a reference pair
/// `(rho_ref, u_ref)` and the integrals that bound it from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct RelativeEnergyReport {
    pub time: f64,
    pub total: f64,
    /// `int rho |m/rho - u_ref|^2 / 2`.
    pub kinetic_part: f64,
    /// `eps^-2m int (P(rho) - P(r) - P'(r)(rho - r))`.
    pub pressure_part: f64,
    /// `int [|m/rho - u_ref|^2]_ess`.
    pub ess_kinetic: f64,
    /// `int [|m|^2/rho]_res`.
    pub res_kinetic: f64,
    /// `eps^-2m int [(rho - r)^2]_ess`.
    pub ess_density_sq: f64,
    /// `eps^-2m int [1]_res`.
    pub res_mass: f64,
    /// `eps^-2m int [rho^gamma]_res`.
    pub res_pressure: f64,
}

impl RelativeEnergyReport {
    /// The four lower-bound groups: ess kinetic, res kinetic, ess density,
    /// res mass plus res pressure.
    pub fn bound_terms(&self) -> [f64; 4] {
        [
            self.ess_kinetic,
            self.res_kinetic,
            self.ess_density_sq,
            self.res_mass + self.res_pressure,
        ]
    }
}

/// Evaluates the relative energy
/// `int rho |m/rho - u_ref|^2/2 + eps^-2m (P(rho) - P(rho_ref) - P'(rho_ref)(rho - rho_ref))`
/// by midpoint quadrature.
///
/// Vacuum cells contribute nothing when their momentum vanishes; a vacuum
/// cell carrying momentum makes the functional infinite and is reported as
/// [`Error::VacuumMomentum`].
pub fn relative_energy(
    state: &State,
    rho_ref: &[f64],
    u_ref: &[Vec<f64>; 3],
    scaling: &ScalingParams,
    eos: &EosParams,
    chi: &Cutoff,
) -> Result<RelativeEnergyReport> {
    let grid = state.grid;
    grid.check_len(rho_ref)?;
    for u in u_ref {
        grid.check_len(u)?;
    }
    let pc = scaling.pressure_coeff();
    let mut acc: [Compensated; 7] = Default::default();
    for c in 0..grid.len() {
        let rho = state.rho[c];
        let r = rho_ref[c];
        if !(r > 0.0) {
            return Err(Error::Domain(format!("reference density {r} at cell {c} must be positive")));
        }
        let m = [state.mom[0][c], state.mom[1][c], state.mom[2][c]];
        let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        let x = chi.chi(rho);
        let (kin, ess_kin, res_kin) = if rho > 0.0 {
            let mut rel2 = 0.0;
            for a in 0..3 {
                let d = m[a] / rho - u_ref[a][c];
                rel2 += d * d;
            }
            (0.5 * rho * rel2, split_exact(x, rel2).0, split_exact(x, m2 / rho).1)
        } else if m2 == 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            return Err(Error::VacuumMomentum(c));
        };
        let (ess_d, _) = split_exact(x, (rho - r) * (rho - r));
        let (_, res_one) = split_exact(x, 1.0);
        let (_, res_p) = split_exact(x, rho.powf(eos.gamma));
        acc[0].add(kin);
        acc[1].add(eos.bregman(rho, r));
        acc[2].add(ess_kin);
        acc[3].add(res_kin);
        acc[4].add(ess_d);
        acc[5].add(res_one);
        acc[6].add(res_p);
    }
    let dv = grid.cell_volume();
    let v = |i: usize| acc[i].value() * dv;
    let kinetic_part = v(0);
    let pressure_part = pc * v(1);
    Ok(RelativeEnergyReport {
        time: state.time,
        total: kinetic_part + pressure_part,
        kinetic_part,
        pressure_part,
        ess_kinetic: v(2),
        res_kinetic: v(3),
        ess_density_sq: pc * v(4),
        res_mass: pc * v(5),
        res_pressure: pc * v(6),
    })
}
