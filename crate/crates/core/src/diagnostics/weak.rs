//! Weak-form residuals of the continuity and momentum equations against
//! smooth space-time test functions, accumulated step by step.
//!
//! For `phi = T(t) Phi(x)` the continuity residual is
//!
//! ```text
//! [int rho psi]_0^tau - int_0^tau int (rho d_t psi + m . grad psi)
//! ```
//!
//! and the momentum residual
//!
//! ```text
//! [int m . phi]_0^tau - int_0^tau int ( m . d_t phi + (m (x) m / rho) : grad phi
//!     + eps^-2m (p(rho) - p(rho_tilde)) div phi - eps^-2n (rho - rho_tilde) phi_3
//!     - eps^-1 (b x m) . phi - eps^alpha S(grad u) : grad phi )
//! ```
//!
//! The hydrostatic part is subtracted before quadrature, so the static
//! state leaves no residual. States are interpolated linearly between
//! steps and each step is integrated with two-point Gauss.

use serde::{Deserialize, Serialize};

use crate::domain::{bump, SlabGrid, State};
use crate::eos::EosParams;
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::solver::{stress_field, Observer, SeriesRow, StepReport, VACUUM_FLOOR};
use crate::statics::StaticProfile;
use crate::{Error, Result};

/// `phi(x, t) = cos(omega t) B(x_h) (w_1 P_t(x_3), w_2 P_t(x_3), w_3 P_n(x_3))`
/// for the momentum equation and `psi = cos(omega t) B(x_h) P_t(x_3)` for
/// continuity. Polynomials are stored by ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    /// Bump center as fractions of the box length.
    pub center: (f64, f64),
    /// Bump radius as a fraction of the box length.
    pub radius: f64,
    pub omega: f64,
    pub tangential: Vec<f64>,
    /// Must vanish at both walls.
    pub normal: Vec<f64>,
    pub weights: [f64; 3],
}

fn poly(c: &[f64], z: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &a in c.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.omega.is_finite() {
            return Err(Error::Config(format!("bad test function {self:?}")));
        }
        let inside = |c: f64| c - self.radius > 0.0 && c + self.radius < 1.0;
        if !(inside(self.center.0) && inside(self.center.1)) {
            return Err(Error::Config(format!(
                "test function support around {:?} touches the periodic seam",
                self.center
            )));
        }
        if self.weights[2] != 0.0 {
            let scale = self.normal.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
            let (p0, _) = poly(&self.normal, 0.0);
            let (p1, _) = poly(&self.normal, 1.0);
            if p0.abs() > 1e-14 * scale || p1.abs() > 1e-14 * scale {
                return Err(Error::Config(format!(
                    "test function violates phi . n = 0 on the walls (normal profile {} at x3=0, {} at x3=1)",
                    p0, p1
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn time_factor(&self, t: f64) -> (f64, f64) {
        let w = self.omega * t;
        (w.cos(), -self.omega * w.sin())
    }

    /// Exact weights `[int l0 T, int l1 T, int l0 T', int l1 T']` over
    /// `[a, b]` for the linear hat functions `l0`, `l1`.
    fn step_weights(&self, a: f64, b: f64) -> [f64; 4] {
        let h = b - a;
        let w = self.omega;
        if w == 0.0 {
            return [0.5 * h, 0.5 * h, 0.0, 0.0];
        }
        let (mid, half) = (0.5 * w * (a + b), 0.5 * w * h);
        let int_t = 2.0 * mid.cos() * half.sin() / w;
        let w1 = (w * b).sin() / w - 2.0 * mid.sin() * half.sin() / (w * w * h);
        let (ta, tb) = ((w * a).cos(), (w * b).cos());
        [int_t - w1, w1, int_t / h - ta, tb - int_t / h]
    }
}

/// Twelve fixed test functions: three bump placements, two vertical
/// profiles each, two time frequencies.
pub fn default_suite() -> Vec<TestFunction> {
    let centers = [((0.5, 0.5), 0.3), ((0.4, 0.6), 0.25), ((0.62, 0.38), 0.2)];
    let vertical: [(Vec<f64>, Vec<f64>); 2] = [
        (vec![1.0], vec![0.0, 1.0, -1.0]),
        (vec![0.5, 1.0, -1.0], vec![0.0, 1.0, -3.0, 2.0]),
    ];
    let weights = [[1.0, 0.5, 1.0], [-0.5, 1.0, 2.0]];
    let mut out = Vec::with_capacity(12);
    for (ci, &(center, radius)) in centers.iter().enumerate() {
        for (vi, (t, n)) in vertical.iter().enumerate() {
            for omega in [0.0, 2.0] {
                out.push(TestFunction {
                    center,
                    radius,
                    omega,
                    tangential: t.clone(),
                    normal: n.clone(),
                    weights: weights[(ci + vi) % 2],
                });
            }
        }
    }
    out
}

/// Spatial factor sampled on a grid: bump cells and vertical profiles.
#[derive(Debug, Clone)]
struct Prepared {
    /// `(i, j, B, d_1 B, d_2 B)` over the bump support.
    cells: Vec<(usize, usize, f64, f64, f64)>,
    /// `(P_t, P_t', P_n, P_n')` per layer.
    layers: Vec<[f64; 4]>,
    weights: [f64; 3],
    grad_sup: f64,
}

impl Prepared {
    fn new(f: &TestFunction, grid: &SlabGrid) -> Self {
        let l = grid.length;
        let mut cells = Vec::new();
        for j in 0..grid.nh {
            for i in 0..grid.nh {
                let (b, g) = bump(f.radius * l, grid.x(i) - f.center.0 * l, grid.x(j) - f.center.1 * l);
                if b > 0.0 {
                    cells.push((i, j, b, g[0], g[1]));
                }
            }
        }
        let layers: Vec<[f64; 4]> = (0..grid.nv)
            .map(|k| {
                let z = grid.z(k);
                let (t, dt) = poly(&f.tangential, z);
                let (n, dn) = poly(&f.normal, z);
                [t, dt, n, dn]
            })
            .collect();
        let mut grad_sup = 0.0f64;
        for &(_, _, b, bx, by) in &cells {
            for p in &layers {
                let w = f.weights;
                let g = [
                    w[0] * bx * p[0],
                    w[0] * by * p[0],
                    w[0] * b * p[1],
                    w[1] * bx * p[0],
                    w[1] * by * p[0],
                    w[1] * b * p[1],
                    w[2] * bx * p[2],
                    w[2] * by * p[2],
                    w[2] * b * p[3],
                ];
                grad_sup = grad_sup.max(g.iter().map(|x| x * x).sum::<f64>().sqrt());
            }
        }
        Prepared {
            cells,
            layers,
            weights: f.weights,
            grad_sup,
        }
    }
}

/// Spatial integrals of one state against one test function:
/// `[int rho Psi, int m . grad Psi, int m . Phi, flux pairing]`.
type Sample = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakResidualReport {
    pub time: f64,
    pub continuity_residuals: Vec<f64>,
    pub momentum_residuals: Vec<f64>,
    /// `E_0 - E(tau) - dissipation(tau)`.
    pub defect_proxy_e: f64,
    /// Smallest energy defect over the output times.
    pub defect_min: f64,
    /// `max_k |R_m,k| / sup |grad phi_k|`: a lower bound on the integrated
    /// momentum-defect trace implied by the stored residuals.
    pub defect_proxy_m_trace: f64,
    /// `defect_proxy_m_trace / int_0^tau (energy defect) dt`, the empirical
    /// compatibility constant; `None` when the energy defect vanishes.
    pub compatibility_ratio: Option<f64>,
}

impl WeakResidualReport {
    pub fn max_continuity(&self) -> f64 {
        self.continuity_residuals.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_momentum(&self) -> f64 {
        self.momentum_residuals.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Streams weak residuals over a run. Plug into [`crate::solver::run`] as an
/// observer, then call [`WeakResidualAccumulator::finish`].
pub struct WeakResidualAccumulator {
    suite: Vec<TestFunction>,
    prepared: Vec<Prepared>,
    grid: SlabGrid,
    scaling: ScalingParams,
    eos: EosParams,
    rho_ref: Vec<f64>,
    p_ref: Vec<f64>,
    viscosity: Option<ViscosityParams>,
    start: Option<(f64, Vec<Sample>)>,
    last: Option<(f64, Vec<Sample>)>,
    integral: Vec<[f64; 2]>,
    series: Vec<(f64, f64)>,
}

impl WeakResidualAccumulator {
    pub fn new(
        suite: Vec<TestFunction>,
        grid: &SlabGrid,
        profile: &StaticProfile,
        scaling: &ScalingParams,
        eos: &EosParams,
        viscosity: Option<&ViscosityParams>,
    ) -> Result<Self> {
        if profile.nv() != grid.nv {
            return Err(Error::Shape {
                expected: grid.nv,
                found: profile.nv(),
            });
        }
        for f in &suite {
            f.validate()?;
        }
        let prepared = suite.iter().map(|f| Prepared::new(f, grid)).collect();
        let n = suite.len();
        Ok(WeakResidualAccumulator {
            suite,
            prepared,
            grid: *grid,
            scaling: *scaling,
            eos: *eos,
            rho_ref: profile.centers.clone(),
            p_ref: profile.centers.iter().map(|&r| eos.p(r)).collect(),
            viscosity: viscosity.filter(|_| scaling.viscous_coeff() > 0.0).copied(),
            start: None,
            last: None,
            integral: vec![[0.0; 2]; n],
            series: Vec::new(),
        })
    }

    fn sample(&self, state: &State) -> Result<Vec<Sample>> {
        let grid = &self.grid;
        grid.check_len(&state.rho)?;
        let stress = match &self.viscosity {
            Some(v) => Some(stress_field(state, v)?.0),
            None => None,
        };
        let pc = self.scaling.pressure_coeff();
        let gc = self.scaling.gravity_coeff();
        let cc = self.scaling.coriolis_coeff();
        let vc = self.scaling.viscous_coeff();
        let dv = grid.cell_volume();
        let mut out = Vec::with_capacity(self.prepared.len());
        for p in &self.prepared {
            let w = p.weights;
            let mut acc = [0.0; 4];
            for (k, lay) in p.layers.iter().enumerate() {
                let [pt, dpt, pn, dpn] = *lay;
                for &(i, j, b, bx, by) in &p.cells {
                    let c = grid.idx(i, j, k);
                    let rho = state.rho[c];
                    let m = [state.mom[0][c], state.mom[1][c], state.mom[2][c]];
                    let gpsi = [bx * pt, by * pt, b * dpt];
                    let phi = [w[0] * b * pt, w[1] * b * pt, w[2] * b * pn];
                    // grad phi, row a = component, column = derivative
                    let g = [
                        [w[0] * gpsi[0], w[0] * gpsi[1], w[0] * gpsi[2]],
                        [w[1] * gpsi[0], w[1] * gpsi[1], w[1] * gpsi[2]],
                        [w[2] * bx * pn, w[2] * by * pn, w[2] * b * dpn],
                    ];
                    let div = g[0][0] + g[1][1] + g[2][2];
                    let mut conv = 0.0;
                    if rho > VACUUM_FLOOR {
                        for a in 0..3 {
                            for bb in 0..3 {
                                conv += m[a] * m[bb] / rho * g[a][bb];
                            }
                        }
                    }
                    let mut flux = conv + pc * (self.eos.p(rho) - self.p_ref[k]) * div
                        - gc * (rho - self.rho_ref[k]) * phi[2]
                        - cc * (m[0] * phi[1] - m[1] * phi[0]);
                    if let Some(s6) = &stress {
                        let s = [s6[0][c], s6[1][c], s6[2][c], s6[3][c], s6[4][c], s6[5][c]];
                        let sg = s[0] * g[0][0]
                            + s[1] * g[1][1]
                            + s[2] * g[2][2]
                            + s[3] * (g[0][1] + g[1][0])
                            + s[4] * (g[0][2] + g[2][0])
                            + s[5] * (g[1][2] + g[2][1]);
                        flux -= vc * sg;
                    }
                    acc[0] += rho * b * pt;
                    acc[1] += m[0] * gpsi[0] + m[1] * gpsi[1] + m[2] * gpsi[2];
                    acc[2] += m[0] * phi[0] + m[1] * phi[1] + m[2] * phi[2];
                    acc[3] += flux;
                }
            }
            out.push(acc.map(|a| a * dv));
        }
        Ok(out)
    }

    fn push(&mut self, state: &State) -> Result<()> {
        let now = self.sample(state)?;
        let t1 = state.time;
        match self.last.take() {
            None => self.start = Some((t1, now.clone())),
            Some((t0, prev)) => {
                let h = t1 - t0;
                if !(h > 0.0) {
                    return Err(Error::TimeGrid(format!("state at t = {t1} does not follow t = {t0}")));
                }
                for (idx, f) in self.suite.iter().enumerate() {
                    let (a, b) = (&prev[idx], &now[idx]);
                    let [w0, w1, d0, d1] = f.step_weights(t0, t1);
                    self.integral[idx][0] += d0 * a[0] + d1 * b[0] + w0 * a[1] + w1 * b[1];
                    self.integral[idx][1] += d0 * a[2] + d1 * b[2] + w0 * a[3] + w1 * b[3];
                }
            }
        }
        self.last = Some((t1, now));
        Ok(())
    }

    /// Residuals so far, with the energy defect taken from the run series.
    pub fn finish(&self, series: &[SeriesRow]) -> Result<WeakResidualReport> {
        let (Some((t0, first)), Some((t1, last))) = (&self.start, &self.last) else {
            return Err(Error::Insufficient("no states were accumulated".into()));
        };
        let mut cont = Vec::with_capacity(self.suite.len());
        let mut mom = Vec::with_capacity(self.suite.len());
        let mut trace = 0.0f64;
        for (idx, f) in self.suite.iter().enumerate() {
            let (ta, _) = f.time_factor(*t0);
            let (tb, _) = f.time_factor(*t1);
            cont.push(tb * last[idx][0] - ta * first[idx][0] - self.integral[idx][0]);
            let rm = tb * last[idx][2] - ta * first[idx][2] - self.integral[idx][1];
            mom.push(rm);
            // |cos| <= 1, so the spatial sup bounds the space-time one
            let gs = self.prepared[idx].grad_sup;
            if gs > 0.0 {
                trace = trace.max(rm.abs() / gs);
            }
        }
        let rows: Vec<(f64, f64)> = if series.is_empty() {
            self.series.clone()
        } else {
            series.iter().map(|r| (r.t, r.defect)).collect()
        };
        let defect_proxy_e = rows.last().map_or(0.0, |r| r.1);
        let defect_min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        let integrated: f64 = rows.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        Ok(WeakResidualReport {
            time: *t1,
            continuity_residuals: cont,
            momentum_residuals: mom,
            defect_proxy_e,
            defect_min: if defect_min.is_finite() { defect_min } else { 0.0 },
            defect_proxy_m_trace: trace,
            compatibility_ratio: (integrated > 0.0).then(|| trace / integrated),
        })
    }
}

impl Observer for WeakResidualAccumulator {
    fn start(&mut self, state: &State) -> Result<()> {
        self.push(state)
    }

    fn step(&mut self, state: &State, _report: &StepReport) -> Result<()> {
        self.push(state)
    }

    fn output(&mut self, _state: &State, row: &SeriesRow) -> Result<()> {
        self.series.push((row.t, row.defect));
        Ok(())
    }
}

/// Weak residuals of a stored trajectory (states in time order).
pub fn weak_residuals(
    trajectory: &[State],
    suite: Vec<TestFunction>,
    profile: &StaticProfile,
    scaling: &ScalingParams,
    eos: &EosParams,
    viscosity: Option<&ViscosityParams>,
) -> Result<WeakResidualReport> {
    let first = trajectory.first().ok_or_else(|| Error::Insufficient("empty trajectory".into()))?;
    let mut acc = WeakResidualAccumulator::new(suite, &first.grid, profile, scaling, eos, viscosity)?;
    for s in trajectory {
        acc.push(s)?;
    }
    acc.finish(&[])
}
