//! Hydrostatic profiles `(rho_tilde, 0)` balancing the scaled pressure against
//! gravity, `grad p(rho_tilde) = eps^{2(m-n)} rho_tilde grad G` with `G = -x_3`.
//!
//! Integrating `P''(rho) rho' = p'(rho)/rho * rho'` gives
//! `P'(rho_tilde) = P'(1) - eps^{2(m-n)} x_3` on the branch anchored at
//! `rho_tilde(0) = 1`, which inverts in closed form.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::domain::{SlabGrid, GHOSTS};
use crate::eos::EosParams;
use crate::scaling::ScalingParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticProfile {
    /// `rho_tilde` at the `nv` cell centers.
    pub centers: Vec<f64>,
    /// `rho_tilde` at the `nv + 1` faces `k dz`.
    pub faces: Vec<f64>,
    /// `d rho_tilde / dx_3` at the cell centers.
    pub gradient: Vec<f64>,
    pub dz: f64,
    /// `(eps, m, n)`.
    pub eps_record: [f64; 3],
    /// `eps^{2(m-n)}`.
    pub stratification: f64,
    pub residual_norm: f64,
    pub eos: EosParams,
}

/// Closed-form anchored profile at height `x3` for stratification `k`.
pub fn profile_value(eos: &EosParams, k: f64, x3: f64) -> Result<f64> {
    let g = eos.gamma;
    let base = (g - 1.0) / (eos.a * g) * (eos.dpotential(1.0) - k * x3) + 1.0 / g;
    if !(base > 0.0) {
        return Err(Error::Parameter(format!(
            "static profile leaves the admissible range at x3 = {x3}: need eps^(2(m-n)) < a*gamma/(gamma-1) = {}",
            eos.a * g / (g - 1.0)
        )));
    }
    Ok(base.powf(1.0 / (g - 1.0)))
}

/// Computes the anchored static profile on the vertical grid.
pub fn static_density(scaling: &ScalingParams, eos: &EosParams, grid: &SlabGrid) -> Result<StaticProfile> {
    eos.validate()?;
    if !(scaling.m > scaling.n) {
        return Err(Error::Parameter(format!(
            "static profile needs m > n, got m = {}, n = {}",
            scaling.m, scaling.n
        )));
    }
    let k = scaling.stratification();
    let bound = eos.a * eos.gamma / (eos.gamma - 1.0);
    if !(k < bound) {
        let max_eps = bound.powf(1.0 / (2.0 * (scaling.m - scaling.n)));
        return Err(Error::Parameter(format!(
            "eps = {} is too large for gamma = {}: the profile density vanishes inside the slab; need eps < {max_eps}",
            scaling.eps, eos.gamma
        )));
    }
    let nv = grid.nv;
    let dz = grid.dz();
    let centers = (0..nv)
        .map(|c| profile_value(eos, k, grid.z(c)))
        .collect::<Result<Vec<_>>>()?;
    let faces = (0..=nv)
        .map(|f| profile_value(eos, k, f as f64 * dz))
        .collect::<Result<Vec<_>>>()?;
    // P''(r) r' = -k
    let gradient = centers.iter().map(|&r| -k / eos.d2potential(r)).collect();
    let mut profile = StaticProfile {
        centers,
        faces,
        gradient,
        dz,
        eps_record: scaling.eps_record(),
        stratification: k,
        residual_norm: 0.0,
        eos: *eos,
    };
    profile.residual_norm = static_residual(&profile);
    Ok(profile)
}

/// `max_faces |(p(r_k) - p(r_{k-1}))/dz + k r_face|` over interior faces.
pub fn static_residual(profile: &StaticProfile) -> f64 {
    let eos = &profile.eos;
    let k = profile.stratification;
    let mut worst = 0.0f64;
    for f in 1..profile.centers.len() {
        let dp = (eos.p(profile.centers[f]) - eos.p(profile.centers[f - 1])) / profile.dz;
        worst = worst.max((dp + k * profile.faces[f]).abs());
    }
    worst
}

impl StaticProfile {
    pub fn nv(&self) -> usize {
        self.centers.len()
    }

    /// Cell-center values extended by even reflection across both walls,
    /// matching the ghost filling of the density.
    pub fn padded_centers(&self) -> Vec<f64> {
        let nv = self.nv();
        let mut out = Vec::with_capacity(nv + 2 * GHOSTS);
        for s in (0..GHOSTS).rev() {
            out.push(self.centers[s.min(nv - 1)]);
        }
        out.extend_from_slice(&self.centers);
        for s in 0..GHOSTS {
            out.push(self.centers[nv - 1 - s.min(nv - 1)]);
        }
        out
    }

    /// `max |rho_tilde - 1|` over centers and faces.
    pub fn deviation(&self) -> f64 {
        self.centers
            .iter()
            .chain(&self.faces)
            .fold(0.0f64, |acc, r| acc.max((r - 1.0).abs()))
    }

    /// Broadcast to a full 3D field on `grid`.
    pub fn field(&self, grid: &SlabGrid) -> Vec<f64> {
        let layer = grid.layer();
        let mut out = Vec::with_capacity(grid.len());
        for &r in &self.centers {
            out.extend(std::iter::repeat(r).take(layer));
        }
        out
    }

    /// Two-column `x3,rho_tilde` CSV over faces and centers, ascending in `x3`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("x3,rho_tilde\n");
        for k in 0..self.nv() {
            let _ = writeln!(out, "{},{}", k as f64 * self.dz, self.faces[k]);
            let _ = writeln!(out, "{},{}", (k as f64 + 0.5) * self.dz, self.centers[k]);
        }
        let nv = self.nv();
        let _ = writeln!(out, "{},{}", nv as f64 * self.dz, self.faces[nv]);
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}
