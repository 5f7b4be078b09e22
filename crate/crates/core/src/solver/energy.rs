use crate::domain::State;
use crate::eos::EosParams;
use crate::scaling::ScalingParams;
use crate::statics::StaticProfile;
use crate::sum::Compensated;
use crate::{Error, Result};

/// `|m|^2 / (2 rho)` with the vacuum convention: `0` when `rho = 0 = m`,
/// `None` (infinite) when `rho = 0` but `m != 0`.
#[inline]
pub fn kinetic_density(rho: f64, m: [f64; 3]) -> Option<f64> {
    let m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    if rho > 0.0 {
        Some(0.5 * m2 / rho)
    } else if m2 == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// `E = int |m|^2/(2 rho) + eps^-2m (P(rho) - P(rho_tilde) - P'(rho_tilde)(rho - rho_tilde))`,
/// plus the matching artificial-pressure gap when `delta > 0`.
///
/// Differs from the physical energy by a time-independent constant (mass is
/// conserved), so energy differences are unaffected.
pub fn total_energy(state: &State, profile: &StaticProfile, eos: &EosParams, scaling: &ScalingParams) -> Result<f64> {
    let grid = state.grid;
    if profile.nv() != grid.nv {
        return Err(Error::Shape {
            expected: grid.nv,
            found: profile.nv(),
        });
    }
    let pc = scaling.pressure_coeff();
    let (delta, g) = (scaling.delta, scaling.big_gamma);
    let layer = grid.layer();
    let mut acc = Compensated::default();
    for (k, &r) in profile.centers.iter().enumerate() {
        for c in k * layer..(k + 1) * layer {
            let rho = state.rho[c];
            let m = [state.mom[0][c], state.mom[1][c], state.mom[2][c]];
            let kin = kinetic_density(rho, m).ok_or(Error::VacuumMomentum(c))?;
            let mut e = kin + pc * eos.bregman(rho, r);
            if delta > 0.0 {
                // potential rho^G/(G-1) with derivative G rho^(G-1)/(G-1)
                let pot = |x: f64| x.powf(g) / (g - 1.0);
                e += delta * (pot(rho) - pot(r) - g * r.powf(g - 1.0) / (g - 1.0) * (rho - r));
            }
            acc.add(e);
        }
    }
    Ok(acc.value() * grid.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SlabGrid;
    use crate::statics::static_density;

    #[test]
    fn vacuum_convention() {
        assert_eq!(kinetic_density(0.0, [0.0; 3]), Some(0.0));
        assert_eq!(kinetic_density(0.0, [1.0, 0.0, 0.0]), None);
        assert_eq!(kinetic_density(2.0, [2.0, 0.0, 0.0]), Some(1.0));
    }

    #[test]
    fn static_state_has_zero_energy() {
        let grid = SlabGrid::new(1.0, 4, 4).unwrap();
        let s = ScalingParams::new(0.5, 3.0, 1.0).unwrap();
        let eos = EosParams::default();
        let p = static_density(&s, &eos, &grid).unwrap();
        let z = vec![0.0; grid.len()];
        let st = State::new(grid, p.field(&grid), [z.clone(), z.clone(), z], 0.0).unwrap();
        assert_eq!(total_energy(&st, &p, &eos, &s).unwrap(), 0.0);
        let mut moving = st.clone();
        moving.mom[0].iter_mut().for_each(|m| *m = 0.1);
        assert!(total_energy(&moving, &p, &eos, &s).unwrap() > 0.0);
    }
}
