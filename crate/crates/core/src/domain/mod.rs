//! Computational slab `[0, L)^2 x (0, 1)`: grid geometry, cell-averaged state,
//! ghost-cell filling and midpoint quadrature.
//!
//! Fields are flat `Vec<f64>` in `(k, j, i)` order: `i` runs fastest along
//! `x_1`, then `j` along `x_2`, then `k` along the vertical `x_3`.

mod snapshot;

pub use snapshot::{read_snapshot, write_field_csv, write_snapshot, Snapshot, SnapshotHeader};

use serde::{Deserialize, Serialize};

use crate::sum::Compensated;
use crate::{Error, Result};

/// Number of ghost layers on every side of a padded field.
pub const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabGrid {
    /// Horizontal period.
    pub length: f64,
    /// Cells per horizontal direction.
    pub nh: usize,
    /// Vertical cells across `(0, 1)`.
    pub nv: usize,
}

impl SlabGrid {
    pub fn new(length: f64, nh: usize, nv: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("box length must be positive, got {length}")));
        }
        if nh < 4 {
            return Err(Error::Config(format!("need at least 4 horizontal cells, got {nh}")));
        }
        if nv < 2 {
            return Err(Error::Config(format!("need at least 2 vertical cells, got {nv}")));
        }
        Ok(SlabGrid { length, nh, nv })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.nh as f64
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        1.0 / self.nv as f64
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dx() * self.dz()
    }

    pub fn volume(&self) -> f64 {
        self.length * self.length
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nh * self.nh * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.nh + j) * self.nh + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn z(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dz()
    }

    /// Cell center `(x_1, x_2, x_3)`.
    pub fn center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.x(i), self.x(j), self.z(k)]
    }

    /// Horizontal layer size `nh * nh`.
    #[inline]
    pub fn layer(&self) -> usize {
        self.nh * self.nh
    }

    /// Evaluate `f(x1, x2, x3)` at every cell center.
    pub fn sample(&self, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.nv {
            let z = self.z(k);
            for j in 0..self.nh {
                let y = self.x(j);
                for i in 0..self.nh {
                    out.push(f(self.x(i), y, z));
                }
            }
        }
        out
    }

    /// Broadcast a horizontal `nh x nh` field (`(j, i)` order) along `x_3`.
    pub fn extrude(&self, horizontal: &[f64]) -> Result<Vec<f64>> {
        if horizontal.len() != self.layer() {
            return Err(Error::Shape {
                expected: self.layer(),
                found: horizontal.len(),
            });
        }
        let mut out = Vec::with_capacity(self.len());
        for _ in 0..self.nv {
            out.extend_from_slice(horizontal);
        }
        Ok(out)
    }

    pub(crate) fn check_len(&self, field: &[f64]) -> Result<()> {
        if field.len() == self.len() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.len(),
                found: field.len(),
            })
        }
    }
}

/// Cell-averaged density and momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub grid: SlabGrid,
    pub rho: Vec<f64>,
    pub mom: [Vec<f64>; 3],
    pub time: f64,
}

impl State {
    /// Rejects negative densities and momentum carried by vacuum cells.
    pub fn new(grid: SlabGrid, rho: Vec<f64>, mom: [Vec<f64>; 3], time: f64) -> Result<Self> {
        grid.check_len(&rho)?;
        for m in &mom {
            grid.check_len(m)?;
        }
        for (c, &r) in rho.iter().enumerate() {
            if !(r >= 0.0) {
                return Err(Error::Domain(format!("density {r} at cell {c} is not >= 0")));
            }
            if r == 0.0 && (mom[0][c] != 0.0 || mom[1][c] != 0.0 || mom[2][c] != 0.0) {
                return Err(Error::VacuumMomentum(c));
            }
        }
        Ok(State {
            grid,
            rho,
            mom,
            time,
        })
    }

    pub fn uniform(grid: SlabGrid, rho: f64, mom: [f64; 3]) -> Result<Self> {
        let n = grid.len();
        Self::new(
            grid,
            vec![rho; n],
            [vec![mom[0]; n], vec![mom[1]; n], vec![mom[2]; n]],
            0.0,
        )
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = Compensated::default();
        for &r in &self.rho {
            acc.add(r);
        }
        acc.value() * self.grid.cell_volume()
    }

    pub fn velocity(&self, c: usize) -> [f64; 3] {
        let r = self.rho[c];
        if r > 0.0 {
            [self.mom[0][c] / r, self.mom[1][c] / r, self.mom[2][c] / r]
        } else {
            [0.0; 3]
        }
    }
}

/// A field with [`GHOSTS`] padding layers on each side in every direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Padded {
    pub nx: usize,
    pub nz: usize,
    pub data: Vec<f64>,
}

impl Padded {
    pub fn zeros(grid: &SlabGrid) -> Self {
        let nx = grid.nh + 2 * GHOSTS;
        let nz = grid.nv + 2 * GHOSTS;
        Padded {
            nx,
            nz,
            data: vec![0.0; nx * nx * nz],
        }
    }

    /// Index with interior coordinates shifted by the ghost width, so
    /// `at(-1, 0, 0)` style access is written `idx(i + GHOSTS - 1, ...)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.nx + j) * self.nx + i
    }

    pub fn load_interior(&mut self, grid: &SlabGrid, field: &[f64]) {
        let g = GHOSTS;
        for k in 0..grid.nv {
            for j in 0..grid.nh {
                let src = grid.idx(0, j, k);
                let dst = self.idx(g, j + g, k + g);
                self.data[dst..dst + grid.nh].copy_from_slice(&field[src..src + grid.nh]);
            }
        }
    }

    pub fn interior(&self, grid: &SlabGrid) -> Vec<f64> {
        let g = GHOSTS;
        let mut out = Vec::with_capacity(grid.len());
        for k in 0..grid.nv {
            for j in 0..grid.nh {
                let src = self.idx(g, j + g, k + g);
                out.extend_from_slice(&self.data[src..src + grid.nh]);
            }
        }
        out
    }

    /// Periodic wrap in both horizontal directions, then reflect vertically
    /// with `parity = +1` (even) or `-1` (odd).
    pub fn fill_ghosts(&mut self, grid: &SlabGrid, parity: f64) {
        let g = GHOSTS;
        let (nh, nv, nx) = (grid.nh, grid.nv, self.nx);
        for k in g..g + nv {
            for j in g..g + nh {
                for s in 0..g {
                    let row = self.idx(0, j, k);
                    self.data[row + s] = self.data[row + s + nh];
                    self.data[row + g + nh + s] = self.data[row + g + s];
                }
            }
            for s in 0..g {
                for i in 0..nx {
                    let lo = self.idx(i, s, k);
                    let lo_src = self.idx(i, s + nh, k);
                    self.data[lo] = self.data[lo_src];
                    let hi = self.idx(i, g + nh + s, k);
                    let hi_src = self.idx(i, g + s, k);
                    self.data[hi] = self.data[hi_src];
                }
            }
        }
        // Ghost layer k = g-1-s mirrors interior layer g+s across x_3 = 0.
        for s in 0..g {
            for j in 0..nx {
                for i in 0..nx {
                    let lo = self.idx(i, j, g - 1 - s);
                    let lo_src = self.idx(i, j, g + s);
                    self.data[lo] = parity * self.data[lo_src];
                    let hi = self.idx(i, j, g + nv + s);
                    let hi_src = self.idx(i, j, g + nv - 1 - s);
                    self.data[hi] = parity * self.data[hi_src];
                }
            }
        }
    }
}

/// State with ghost layers filled: periodic horizontally, reflecting at the
/// walls (`rho`, `m_1`, `m_2` even, `m_3` odd).
#[derive(Debug, Clone, PartialEq)]
pub struct GhostState {
    pub grid: SlabGrid,
    pub rho: Padded,
    pub mom: [Padded; 3],
    pub time: f64,
}

impl GhostState {
    pub fn refill(&mut self) {
        let grid = self.grid;
        self.rho.fill_ghosts(&grid, 1.0);
        self.mom[0].fill_ghosts(&grid, 1.0);
        self.mom[1].fill_ghosts(&grid, 1.0);
        self.mom[2].fill_ghosts(&grid, -1.0);
    }

    pub fn interior(&self) -> Result<State> {
        State::new(
            self.grid,
            self.rho.interior(&self.grid),
            [
                self.mom[0].interior(&self.grid),
                self.mom[1].interior(&self.grid),
                self.mom[2].interior(&self.grid),
            ],
            self.time,
        )
    }

    /// Largest `|m_3|` on the two wall faces, reconstructed as the average of
    /// the interior cell and its mirror ghost.
    pub fn wall_normal_momentum(&self) -> f64 {
        let g = GHOSTS;
        let (nh, nv) = (self.grid.nh, self.grid.nv);
        let m3 = &self.mom[2];
        let mut worst = 0.0f64;
        for j in g..g + nh {
            for i in g..g + nh {
                let bottom = 0.5 * (m3.data[m3.idx(i, j, g - 1)] + m3.data[m3.idx(i, j, g)]);
                let top = 0.5 * (m3.data[m3.idx(i, j, g + nv - 1)] + m3.data[m3.idx(i, j, g + nv)]);
                worst = worst.max(bottom.abs()).max(top.abs());
            }
        }
        worst
    }
}

pub fn apply_boundary(state: &State) -> GhostState {
    let grid = state.grid;
    let load = |f: &[f64]| {
        let mut p = Padded::zeros(&grid);
        p.load_interior(&grid, f);
        p
    };
    let mut gs = GhostState {
        grid,
        rho: load(&state.rho),
        mom: [load(&state.mom[0]), load(&state.mom[1]), load(&state.mom[2])],
        time: state.time,
    };
    gs.refill();
    gs
}

/// Horizontal sub-box `[x.0, x.1] x [y.0, y.1]` (full depth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Window {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Window { x, y }
    }

    /// The centered half-size box `[L/4, 3L/4]^2`.
    pub fn centered_half(grid: &SlabGrid) -> Self {
        let l = grid.length;
        Window::new((0.25 * l, 0.75 * l), (0.25 * l, 0.75 * l))
    }

    pub fn validate(&self, grid: &SlabGrid) -> Result<()> {
        let inside = |(a, b): (f64, f64)| 0.0 <= a && a < b && b <= grid.length;
        if inside(self.x) && inside(self.y) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "window {self:?} is not a sub-box of [0, {}]^2",
                grid.length
            )))
        }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.0 <= x && x <= self.x.1 && self.y.0 <= y && y <= self.y.1
    }

    pub fn area(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0)
    }
}

/// Smooth bump `exp(1 - 1/(1 - s))`, `s = (dx^2 + dy^2)/r^2`, supported in the
/// disc of radius `r`, with its gradient. Equals 1 at the center.
pub fn bump(r: f64, dx: f64, dy: f64) -> (f64, [f64; 2]) {
    let s = (dx * dx + dy * dy) / (r * r);
    if s >= 1.0 {
        return (0.0, [0.0; 2]);
    }
    let b = (1.0 - 1.0 / (1.0 - s)).exp();
    let f = -2.0 * b / (r * r * (1.0 - s) * (1.0 - s));
    (b, [f * dx, f * dy])
}

/// Midpoint rule `sum f * dx^2 dz`, restricted to cells whose centers lie in
/// `window` when one is given.
pub fn grid_integral(grid: &SlabGrid, field: &[f64], window: Option<&Window>) -> Result<f64> {
    grid.check_len(field)?;
    let mut acc = Compensated::default();
    match window {
        None => field.iter().for_each(|&v| acc.add(v)),
        Some(w) => {
            w.validate(grid)?;
            for k in 0..grid.nv {
                for j in 0..grid.nh {
                    let y = grid.x(j);
                    for i in 0..grid.nh {
                        if w.contains(grid.x(i), y) {
                            acc.add(field[grid.idx(i, j, k)]);
                        }
                    }
                }
            }
        }
    }
    Ok(acc.value() * grid.cell_volume())
}

/// Gravitational potential `G = -x_3` with `grad G = (0, 0, -1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub values: Vec<f64>,
    pub gradient: [f64; 3],
}

impl Potential {
    pub const GRADIENT: [f64; 3] = [0.0, 0.0, -1.0];

    pub fn on_grid(grid: &SlabGrid) -> Self {
        Potential {
            values: grid.sample(|_, _, z| -z),
            gradient: Self::GRADIENT,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_geometry() {
        let g = SlabGrid::new(2.0 * PI, 4, 2).unwrap();
        assert_relative_eq!(g.dx(), PI / 2.0);
        assert_eq!(g.dz(), 0.5);
        let g = SlabGrid::new(1.0, 8, 4).unwrap();
        assert_eq!((g.dx(), g.dz()), (0.125, 0.25));
        assert_eq!(g.center(0, 1, 3), [0.0625, 0.1875, 0.875]);
        assert!(matches!(SlabGrid::new(1.0, 0, 4), Err(Error::Config(_))));
        assert!(SlabGrid::new(-1.0, 8, 4).is_err());
        assert!(SlabGrid::new(1.0, 8, 1).is_err());
    }

    #[test]
    fn state_rejects_vacuum_momentum() {
        let g = SlabGrid::new(1.0, 4, 2).unwrap();
        let mut rho = vec![1.0; g.len()];
        rho[3] = 0.0;
        let mut m1 = vec![0.0; g.len()];
        assert!(State::new(g, rho.clone(), [m1.clone(), m1.clone(), m1.clone()], 0.0).is_ok());
        m1[3] = 0.1;
        let err = State::new(g, rho.clone(), [m1.clone(), vec![0.0; g.len()], vec![0.0; g.len()]], 0.0);
        assert!(matches!(err, Err(Error::VacuumMomentum(3))));
        rho[0] = -1.0;
        assert!(State::new(g, rho, [vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]], 0.0).is_err());
    }

    #[test]
    fn uniform_ghosts_match_interior() {
        let g = SlabGrid::new(1.0, 4, 2).unwrap();
        let s = State::uniform(g, 1.0, [0.0; 3]).unwrap();
        let gs = apply_boundary(&s);
        assert!(gs.rho.data.iter().all(|&r| r == 1.0));
        assert!(gs.mom.iter().all(|m| m.data.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn reflection_and_wrap() {
        let g = SlabGrid::new(1.0, 4, 3).unwrap();
        let mut s = State::uniform(g, 1.0, [0.0; 3]).unwrap();
        let c = g.idx(1, 2, 0);
        s.mom[2][c] = 0.2;
        s.rho[c] = 1.3;
        s.rho[g.idx(3, 1, 1)] = 7.0;
        let gs = apply_boundary(&s);
        let h = GHOSTS;
        let ghost = gs.mom[2].idx(1 + h, 2 + h, h - 1);
        assert_eq!(gs.mom[2].data[ghost], -0.2);
        assert_eq!(gs.rho.data[gs.rho.idx(1 + h, 2 + h, h - 1)], 1.3);
        // left neighbor of i = 0 is i = nh - 1
        assert_eq!(gs.rho.data[gs.rho.idx(h - 1, 1 + h, 1 + h)], 7.0);
        assert_eq!(gs.wall_normal_momentum(), 0.0);
    }

    #[test]
    fn boundary_fill_is_idempotent() {
        let g = SlabGrid::new(1.0, 6, 4).unwrap();
        let rho = g.sample(|x, y, z| 1.0 + 0.1 * (x * 3.0).sin() * y + z);
        let m = g.sample(|x, y, z| x - y * z);
        let s = State::new(g, rho, [m.clone(), m.clone(), m], 0.0).unwrap();
        let once = apply_boundary(&s);
        let mut twice = once.clone();
        twice.refill();
        assert_eq!(once, twice);
        assert_eq!(once.interior().unwrap(), s);
        assert!(once.wall_normal_momentum() <= 1e-15);
    }

    #[test]
    fn integral_cases() {
        let g = SlabGrid::new(1.0, 8, 4).unwrap();
        assert_relative_eq!(grid_integral(&g, &vec![1.0; g.len()], None).unwrap(), 1.0);
        let g2 = SlabGrid::new(3.0, 8, 4).unwrap();
        assert_relative_eq!(grid_integral(&g2, &vec![2.5; g2.len()], None).unwrap(), 22.5);
        let half: Vec<f64> = (0..g.len()).map(|c| if c % 2 == 0 { 1.0 } else { 0.0 }).collect();
        assert_relative_eq!(grid_integral(&g, &half, None).unwrap(), 0.5);
        let w = Window::new((0.0, 0.5), (0.0, 1.0));
        assert_relative_eq!(grid_integral(&g, &vec![1.0; g.len()], Some(&w)).unwrap(), 0.5);
        let bad = Window::new((0.5, 1.5), (0.0, 1.0));
        assert!(matches!(grid_integral(&g, &vec![1.0; g.len()], Some(&bad)), Err(Error::Domain(_))));
        assert!(grid_integral(&g, &[1.0], None).is_err());
    }

    #[test]
    fn potential_is_exact() {
        let g = SlabGrid::new(1.0, 4, 4).unwrap();
        let p = Potential::on_grid(&g);
        assert_eq!(p.gradient, [0.0, 0.0, -1.0]);
        assert_eq!(p.values[g.idx(2, 1, 3)], -0.875);
    }

    proptest! {
        #[test]
        fn integral_is_additive(a in proptest::collection::vec(-10.0f64..10.0, 128), b in proptest::collection::vec(-10.0f64..10.0, 128)) {
            let g = SlabGrid::new(2.0, 8, 2).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = grid_integral(&g, &sum, None).unwrap();
            let rhs = grid_integral(&g, &a, None).unwrap() + grid_integral(&g, &b, None).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs().max(rhs.abs())) * 10.0);
        }
    }
}
