use crate::domain::State;
use crate::scaling::ScalingParams;
use crate::statics::StaticProfile;
use crate::{Error, Result};

/// Momentum tendency `-(1/eps) b x m + eps^-2n (rho - rho_tilde) grad G`
/// with `b = e_3` and `grad G = -e_3`.
pub fn source_terms(state: &State, profile: &StaticProfile, scaling: &ScalingParams) -> Result<[Vec<f64>; 3]> {
    let grid = state.grid;
    if profile.nv() != grid.nv {
        return Err(Error::Shape {
            expected: grid.nv,
            found: profile.nv(),
        });
    }
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    add_sources(state, profile, scaling.coriolis_coeff(), scaling.gravity_coeff(), &mut out);
    Ok(out)
}

/// Accumulates the sources into `out`; a zero coefficient skips that term.
pub(crate) fn add_sources(state: &State, profile: &StaticProfile, coriolis: f64, gravity: f64, out: &mut [Vec<f64>; 3]) {
    let grid = state.grid;
    let layer = grid.layer();
    let [o1, o2, o3] = out;
    if coriolis != 0.0 {
        let (m1, m2) = (&state.mom[0], &state.mom[1]);
        for c in 0..grid.len() {
            // b x m = (-m2, m1, 0)
            o1[c] += coriolis * m2[c];
            o2[c] -= coriolis * m1[c];
        }
    }
    if gravity != 0.0 {
        for (k, &r) in profile.centers.iter().enumerate() {
            let range = k * layer..(k + 1) * layer;
            for (o, &rho) in o3[range.clone()].iter_mut().zip(&state.rho[range]) {
                *o -= gravity * (rho - r);
            }
        }
    }
}
