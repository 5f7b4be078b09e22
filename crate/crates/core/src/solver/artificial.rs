use crate::domain::State;
use crate::scaling::ScalingParams;
use crate::statics::StaticProfile;
use crate::{Error, Result};

/// Momentum tendency `-delta grad(rho^Gamma - rho_tilde^Gamma)` in the
/// face-averaged form the solver uses (central differences, even mirror at
/// the walls). Zero when `delta = 0`.
pub fn artificial_pressure_term(state: &State, profile: &StaticProfile, scaling: &ScalingParams) -> Result<[Vec<f64>; 3]> {
    let grid = state.grid;
    if profile.nv() != grid.nv {
        return Err(Error::Shape {
            expected: grid.nv,
            found: profile.nv(),
        });
    }
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    if scaling.delta == 0.0 {
        return Ok(out);
    }
    let (nh, nv) = (grid.nh, grid.nv);
    let g = scaling.big_gamma;
    let mut phi = vec![0.0; n];
    for k in 0..nv {
        let reference = profile.centers[k].powf(g);
        for c in k * grid.layer()..(k + 1) * grid.layer() {
            phi[c] = scaling.delta * (state.rho[c].powf(g) - reference);
        }
    }
    let (hx, hz) = (0.5 / grid.dx(), 0.5 / grid.dz());
    for k in 0..nv {
        let ku = if k + 1 < nv { k + 1 } else { k };
        let kd = if k > 0 { k - 1 } else { k };
        for j in 0..nh {
            for i in 0..nh {
                let c = grid.idx(i, j, k);
                out[0][c] = -(phi[grid.idx((i + 1) % nh, j, k)] - phi[grid.idx((i + nh - 1) % nh, j, k)]) * hx;
                out[1][c] = -(phi[grid.idx(i, (j + 1) % nh, k)] - phi[grid.idx(i, (j + nh - 1) % nh, k)]) * hx;
                out[2][c] = -(phi[grid.idx(i, j, ku)] - phi[grid.idx(i, j, kd)]) * hz;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SlabGrid;
    use crate::eos::EosParams;
    use crate::statics::static_density;

    #[test]
    fn off_and_static_are_zero() {
        let grid = SlabGrid::new(1.0, 4, 4).unwrap();
        let s = ScalingParams::full(0.5, 3.0, 1.0, 0.0, 0.3, 2.0).unwrap();
        let p = static_density(&s, &EosParams::default(), &grid).unwrap();
        let z = vec![0.0; grid.len()];
        let st = State::new(grid, p.field(&grid), [z.clone(), z.clone(), z], 0.0).unwrap();
        let t = artificial_pressure_term(&st, &p, &s).unwrap();
        assert!(t.iter().all(|c| c.iter().all(|&v| v == 0.0)));
        let off = ScalingParams::new(0.5, 3.0, 1.0).unwrap();
        let mut st2 = st.clone();
        st2.rho[3] += 0.1;
        let t = artificial_pressure_term(&st2, &p, &off).unwrap();
        assert!(t.iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn small_perturbation_linearizes() {
        // rho = rho_tilde + h, Gamma = 2: tendency ~ -delta grad(2 rho_tilde h)
        let grid = SlabGrid::new(1.0, 32, 4).unwrap();
        let delta = 0.3;
        let s = ScalingParams::full(0.5, 3.0, 1.0, 0.0, delta, 2.0).unwrap();
        let p = static_density(&s, &EosParams::default(), &grid).unwrap();
        let amp = 1e-6;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut rho = p.field(&grid);
        for (c, r) in rho.iter_mut().enumerate() {
            let i = c % 32;
            *r += amp * (two_pi * grid.x(i)).sin();
        }
        let z = vec![0.0; grid.len()];
        let st = State::new(grid, rho, [z.clone(), z.clone(), z], 0.0).unwrap();
        let t = artificial_pressure_term(&st, &p, &s).unwrap();
        for k in 0..4 {
            for i in 0..32 {
                let c = grid.idx(i, 5, k);
                let expect = -delta * 2.0 * p.centers[k] * amp * two_pi * (two_pi * grid.x(i)).cos();
                assert!((t[0][c] - expect).abs() < 0.01 * delta * 2.0 * amp * two_pi);
            }
        }
    }
}
