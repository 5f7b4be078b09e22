use serde::Serialize;

use super::energy::total_energy;
use super::flux::{face_flux, Coeffs, Prim};
use super::source::add_sources;
use super::viscous::add_viscous;
use super::{Integrator, SolverConfig, VACUUM_FLOOR};
use crate::domain::State;
use crate::eos::EosParams;
use crate::scaling::{ScalingParams, ViscosityParams};
use crate::statics::StaticProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    /// Time after the step.
    pub time: f64,
    pub dt: f64,
    pub max_wave_speed: f64,
    pub total_mass: f64,
    /// Energy `E_eps` after the step.
    pub total_energy: f64,
    /// Viscous dissipation accumulated during this step.
    pub dissipation: f64,
    /// `dt * max_wave_speed / min(dx, dz)`.
    pub cfl: f64,
    /// Cells clamped up to the vacuum floor.
    pub floor_clamps: usize,
}

/// Largest stable step: acoustic `cfl min(dx,dz) / max(|u| + eps^-m c)`,
/// Coriolis `cfl eps`, and with viscosity `cfl min(dx,dz)^2 / (4 eps^alpha max(mu, lambda))`.
pub fn stable_dt(state: &State, eos: &EosParams, scaling: &ScalingParams, viscosity: Option<&ViscosityParams>, cfl: f64) -> f64 {
    let grid = state.grid;
    let h = grid.dx().min(grid.dz());
    let speed = max_wave_speed(state, eos, scaling.inv_mach(), scaling.delta, scaling.big_gamma);
    let mut dt = if speed > 0.0 { cfl * h / speed } else { f64::INFINITY };
    dt = dt.min(cfl * scaling.eps);
    let nu = scaling.viscous_coeff();
    if let Some(v) = viscosity {
        if nu > 0.0 {
            dt = dt.min(cfl * h * h / (4.0 * nu * v.mu.max(v.lambda)));
        }
    }
    dt
}

fn max_wave_speed(state: &State, eos: &EosParams, inv_mach: f64, delta: f64, big_gamma: f64) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..state.grid.len() {
        let r = state.rho[c];
        if r <= 0.0 {
            continue;
        }
        let [u1, u2, u3] = [0, 1, 2].map(|a| state.mom[a][c] / r);
        let mut c2 = inv_mach * inv_mach * eos.dp(r);
        if delta > 0.0 {
            c2 += delta * big_gamma * r.powf(big_gamma - 1.0);
        }
        worst = worst.max((u1 * u1 + u2 * u2 + u3 * u3).sqrt() + c2.sqrt());
    }
    worst
}

/// Right-hand side `d_t (rho, m_1, m_2, m_3)` plus the viscous dissipation rate.
struct Tendency {
    u: [Vec<f64>; 4],
    dissipation: f64,
}

/// Stepper bound to one configuration and static profile.
#[derive(Debug, Clone)]
pub struct PrimitiveSolver {
    pub config: SolverConfig,
    pub profile: StaticProfile,
    coeffs: Coeffs,
}

impl PrimitiveSolver {
    pub fn new(config: SolverConfig, profile: StaticProfile) -> Result<Self> {
        config.validate()?;
        let coeffs = Coeffs::from_config(&config);
        Ok(PrimitiveSolver { config, profile, coeffs })
    }

    pub fn stable_dt(&self, state: &State) -> f64 {
        let c = &self.config;
        stable_dt(state, &c.eos, &c.scaling, c.viscosity.as_ref(), c.cfl)
    }

    pub fn energy(&self, state: &State) -> Result<f64> {
        total_energy(state, &self.profile, &self.config.eos, &self.config.scaling)
    }

    fn check_grid(&self, state: &State) -> Result<()> {
        if self.profile.nv() != state.grid.nv {
            return Err(Error::Shape {
                expected: self.profile.nv(),
                found: state.grid.nv,
            });
        }
        Ok(())
    }

    fn tendency(&self, state: &State) -> Result<Tendency> {
        let grid = state.grid;
        let (nh, nv, n, layer) = (grid.nh, grid.nv, grid.len(), grid.layer());
        let c = &self.coeffs;
        let mut prims = Vec::with_capacity(n);
        for k in 0..nv {
            let r = self.profile.centers[k];
            for cell in k * layer..(k + 1) * layer {
                let rho = state.rho[cell];
                if !(rho > 0.0) {
                    return Err(Error::StepRejected {
                        time: state.time,
                        reason: format!("density {rho} at cell {cell}"),
                        snapshot: Some(Box::new(state.clone())),
                    });
                }
                let m = [state.mom[0][cell], state.mom[1][cell], state.mom[2][cell]];
                prims.push(Prim::new(c, rho, r, m));
            }
        }
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        let (ix, iz) = (1.0 / grid.dx(), 1.0 / grid.dz());
        let apply = |out: &mut [Vec<f64>; 4], f: [f64; 4], l: Option<usize>, r: Option<usize>, inv: f64| {
            for q in 0..4 {
                let v = f[q] * inv;
                if let Some(l) = l {
                    out[q][l] -= v;
                }
                if let Some(r) = r {
                    out[q][r] += v;
                }
            }
        };
        for k in 0..nv {
            for j in 0..nh {
                for i in 0..nh {
                    let here = grid.idx(i, j, k);
                    let west = grid.idx((i + nh - 1) % nh, j, k);
                    let f = face_flux(c, 0, &prims[west], &prims[here]);
                    apply(&mut out, f, Some(west), Some(here), ix);
                    let south = grid.idx(i, (j + nh - 1) % nh, k);
                    let f = face_flux(c, 1, &prims[south], &prims[here]);
                    apply(&mut out, f, Some(south), Some(here), ix);
                    if k == 0 {
                        let f = face_flux(c, 2, &prims[here].reflect(), &prims[here]);
                        apply(&mut out, f, None, Some(here), iz);
                    } else {
                        let below = grid.idx(i, j, k - 1);
                        let f = face_flux(c, 2, &prims[below], &prims[here]);
                        apply(&mut out, f, Some(below), Some(here), iz);
                    }
                    if k == nv - 1 {
                        let f = face_flux(c, 2, &prims[here], &prims[here].reflect());
                        apply(&mut out, f, Some(here), None, iz);
                    }
                }
            }
        }
        let terms = self.config.terms;
        let s = &self.config.scaling;
        let coriolis = if terms.coriolis { s.coriolis_coeff() } else { 0.0 };
        let gravity = if terms.gravity { s.gravity_coeff() } else { 0.0 };
        let [_, o1, o2, o3] = &mut out;
        let mut mom = [std::mem::take(o1), std::mem::take(o2), std::mem::take(o3)];
        add_sources(state, &self.profile, coriolis, gravity, &mut mom);
        let mut dissipation = 0.0;
        if let Some((visc, coeff)) = self.config.active_viscosity() {
            dissipation = add_viscous(state, &visc, coeff, &mut mom)?;
        }
        let [m1, m2, m3] = mom;
        out[1] = m1;
        out[2] = m2;
        out[3] = m3;
        Ok(Tendency { u: out, dissipation })
    }

    /// `base + dt * tend`, with floor clamping and rejection of NaN or
    /// negative densities.
    fn euler_update(&self, state: &State, tend: &Tendency, dt: f64, clamps: &mut usize) -> Result<State> {
        let mut next = state.clone();
        next.time = state.time + dt;
        let reject = |reason: String| Error::StepRejected {
            time: state.time,
            reason,
            snapshot: Some(Box::new(state.clone())),
        };
        for c in 0..state.grid.len() {
            let rho = state.rho[c] + dt * tend.u[0][c];
            if !(rho >= 0.0) {
                return Err(reject(format!("density {rho} at cell {c} after the update")));
            }
            next.rho[c] = if rho < VACUUM_FLOOR {
                *clamps += 1;
                VACUUM_FLOOR
            } else {
                rho
            };
            for a in 0..3 {
                let m = state.mom[a][c] + dt * tend.u[a + 1][c];
                if !m.is_finite() {
                    return Err(reject(format!("momentum {m} at cell {c}")));
                }
                next.mom[a][c] = m;
            }
        }
        Ok(next)
    }

    /// Advances one step of size `dt`.
    pub fn step(&self, state: &State, dt: f64) -> Result<(State, StepReport)> {
        self.check_grid(state)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
        }
        let mut clamps = 0;
        let t0 = self.tendency(state)?;
        let (next, dissipation) = match self.config.integrator {
            Integrator::ForwardEuler => (self.euler_update(state, &t0, dt, &mut clamps)?, dt * t0.dissipation),
            Integrator::Heun => {
                let stage = self.euler_update(state, &t0, dt, &mut clamps)?;
                let t1 = self.tendency(&stage)?;
                let stage2 = self.euler_update(&stage, &t1, dt, &mut clamps)?;
                let mut next = stage2;
                for c in 0..state.grid.len() {
                    next.rho[c] = 0.5 * (state.rho[c] + next.rho[c]);
                    for a in 0..3 {
                        next.mom[a][c] = 0.5 * (state.mom[a][c] + next.mom[a][c]);
                    }
                }
                next.time = state.time + dt;
                (next, 0.5 * dt * (t0.dissipation + t1.dissipation))
            }
        };
        let s = &self.config.scaling;
        let speed = max_wave_speed(&next, &self.config.eos, s.inv_mach(), s.delta, s.big_gamma);
        let grid = state.grid;
        let report = StepReport {
            time: next.time,
            dt,
            max_wave_speed: speed,
            total_mass: next.total_mass(),
            total_energy: self.energy(&next)?,
            dissipation,
            cfl: dt * speed / grid.dx().min(grid.dz()),
            floor_clamps: clamps,
        };
        Ok((next, report))
    }
}
