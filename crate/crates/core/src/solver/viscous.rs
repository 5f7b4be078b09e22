use super::VACUUM_FLOOR;
use crate::domain::{SlabGrid, State};
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::{Error, Result};

/// Momentum tendency `eps^alpha div S(grad u)` and the matching dissipation
/// rate `eps^alpha int S(grad u) : grad u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousTendency {
    pub mom: [Vec<f64>; 3],
    pub dissipation: f64,
}

/// Newtonian stress `mu (D - div u / 3 I) + lambda div u I` for
/// `grad_u[a][b] = d_b u_a`.
pub fn stress_tensor(grad_u: &[[f64; 3]; 3], visc: &ViscosityParams) -> [[f64; 3]; 3] {
    let div = grad_u[0][0] + grad_u[1][1] + grad_u[2][2];
    let mut s = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            s[a][b] = visc.mu * 0.5 * (grad_u[a][b] + grad_u[b][a]);
        }
        s[a][a] += (visc.lambda - visc.mu / ViscosityParams::DIM) * div;
    }
    s
}

/// Central-difference viscous tendency with complete slip at the walls
/// (`u_1`, `u_2` even and `u_3` odd across `x_3 = 0, 1`). Zero when
/// `alpha = 0`.
pub fn viscous_flux(state: &State, visc: &ViscosityParams, scaling: &ScalingParams) -> Result<ViscousTendency> {
    visc.validate()?;
    let n = state.grid.len();
    let mut mom = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let coeff = scaling.viscous_coeff();
    let dissipation = if coeff > 0.0 {
        add_viscous(state, visc, coeff, &mut mom)?
    } else {
        0.0
    };
    Ok(ViscousTendency { mom, dissipation })
}

/// Vertical neighbor of layer `k` shifted by `dk` (+-1), with the mirror
/// parity to apply to the value found there.
#[inline]
fn vertical(k: usize, up: bool, nv: usize) -> (usize, bool) {
    if up {
        if k + 1 < nv {
            (k + 1, false)
        } else {
            (k, true)
        }
    } else if k > 0 {
        (k - 1, false)
    } else {
        (k, true)
    }
}

/// Cell stress `S(grad u)` as components (00, 11, 22, 01, 02, 12) together
/// with the cell sum of `S : grad u`.
pub(crate) fn stress_field(state: &State, visc: &ViscosityParams) -> Result<([Vec<f64>; 6], f64)> {
    let grid: SlabGrid = state.grid;
    let (nh, nv) = (grid.nh, grid.nv);
    let n = grid.len();
    let mut u = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for c in 0..n {
        let r = state.rho[c];
        if !(r > VACUUM_FLOOR) {
            return Err(Error::StepRejected {
                time: state.time,
                reason: format!("viscous term needs a velocity, density {r} at cell {c}"),
                snapshot: None,
            });
        }
        for a in 0..3 {
            u[a][c] = state.mom[a][c] / r;
        }
    }
    let inv2 = [0.5 / grid.dx(), 0.5 / grid.dx(), 0.5 / grid.dz()];
    // velocity parity across the walls
    let vpar = [1.0, 1.0, -1.0];
    // symmetric stress, components (00, 11, 22, 01, 02, 12)
    let mut s6: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
    let mut diss = 0.0;
    for k in 0..nv {
        let (ku, fu) = vertical(k, true, nv);
        let (kd, fd) = vertical(k, false, nv);
        for j in 0..nh {
            let (jp, jm) = ((j + 1) % nh, (j + nh - 1) % nh);
            for i in 0..nh {
                let (ip, im) = ((i + 1) % nh, (i + nh - 1) % nh);
                let c = grid.idx(i, j, k);
                let mut g = [[0.0; 3]; 3];
                for a in 0..3 {
                    let ua = &u[a];
                    g[a][0] = (ua[grid.idx(ip, j, k)] - ua[grid.idx(im, j, k)]) * inv2[0];
                    g[a][1] = (ua[grid.idx(i, jp, k)] - ua[grid.idx(i, jm, k)]) * inv2[1];
                    let up = ua[grid.idx(i, j, ku)] * if fu { vpar[a] } else { 1.0 };
                    let dn = ua[grid.idx(i, j, kd)] * if fd { vpar[a] } else { 1.0 };
                    g[a][2] = (up - dn) * inv2[2];
                }
                let s = stress_tensor(&g, visc);
                let mut sg = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        sg += s[a][b] * g[a][b];
                    }
                }
                diss += sg;
                s6[0][c] = s[0][0];
                s6[1][c] = s[1][1];
                s6[2][c] = s[2][2];
                s6[3][c] = s[0][1];
                s6[4][c] = s[0][2];
                s6[5][c] = s[1][2];
            }
        }
    }
    Ok((s6, diss))
}

/// Adds `coeff div S` into `out` and returns `coeff int S : grad u`.
pub(crate) fn add_viscous(state: &State, visc: &ViscosityParams, coeff: f64, out: &mut [Vec<f64>; 3]) -> Result<f64> {
    let grid: SlabGrid = state.grid;
    let (nh, nv) = (grid.nh, grid.nv);
    let inv2 = [0.5 / grid.dx(), 0.5 / grid.dx(), 0.5 / grid.dz()];
    let (s6, diss) = stress_field(state, visc)?;
    // row a of S as indices into s6
    const ROW: [[usize; 3]; 3] = [[0, 3, 4], [3, 1, 5], [4, 5, 2]];
    // S_{a3} parity: odd for tangential rows, even for the normal row
    let spar = [-1.0, -1.0, 1.0];
    for k in 0..nv {
        let (ku, fu) = vertical(k, true, nv);
        let (kd, fd) = vertical(k, false, nv);
        for j in 0..nh {
            let (jp, jm) = ((j + 1) % nh, (j + nh - 1) % nh);
            for i in 0..nh {
                let (ip, im) = ((i + 1) % nh, (i + nh - 1) % nh);
                let c = grid.idx(i, j, k);
                for a in 0..3 {
                    let [sx, sy, sz] = ROW[a].map(|r| &s6[r]);
                    let mut d = (sx[grid.idx(ip, j, k)] - sx[grid.idx(im, j, k)]) * inv2[0];
                    d += (sy[grid.idx(i, jp, k)] - sy[grid.idx(i, jm, k)]) * inv2[1];
                    let up = sz[grid.idx(i, j, ku)] * if fu { spar[a] } else { 1.0 };
                    let dn = sz[grid.idx(i, j, kd)] * if fd { spar[a] } else { 1.0 };
                    d += (up - dn) * inv2[2];
                    out[a][c] += coeff * d;
                }
            }
        }
    }
    Ok(coeff * diss * grid.cell_volume())
}
