//! Well-prepared initial data
//!
//! ```text
//! rho_0 = rho_tilde + eps^m eps^theta g
//! m_0   = rho_0 ((v_0, 0) + eps^theta w)
//! ```
//!
//! with `g = A_rho B(x_h)` and `w = A_u grad(B(x_h) cos(pi x_3))`, where `B` is
//! the compactly supported bump `exp(1 - 1/(1 - |x_h - c|^2/R^2))`. The
//! vertical component of `w` is `-pi A_u B sin(pi x_3)`, odd across both
//! walls and zero on them.

use serde::{Deserialize, Serialize};

use crate::domain::{bump, SlabGrid, State};
use crate::scaling::ScalingParams;
use crate::statics::StaticProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    /// Amplitude law exponent; `None` switches the perturbation off.
    pub theta: Option<f64>,
    /// Bump radius as a fraction of the box length.
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Bump center as fractions of the box length.
    #[serde(default = "default_center")]
    pub center: (f64, f64),
    #[serde(default = "unit")]
    pub density_amplitude: f64,
    #[serde(default = "unit")]
    pub velocity_amplitude: f64,
}

fn default_radius() -> f64 {
    0.25
}

fn default_center() -> (f64, f64) {
    (0.5, 0.5)
}

fn unit() -> f64 {
    1.0
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        PerturbationSpec {
            theta: Some(1.0),
            radius: default_radius(),
            center: default_center(),
            density_amplitude: 1.0,
            velocity_amplitude: 1.0,
        }
    }
}

impl PerturbationSpec {
    pub fn off() -> Self {
        PerturbationSpec {
            theta: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.theta {
            if !(t > 0.0) {
                return Err(Error::Config(format!("amplitude exponent theta must be > 0, got {t}")));
            }
        }
        if !(self.radius > 0.0) {
            return Err(Error::Config(format!("bump radius must be positive, got {}", self.radius)));
        }
        let (cx, cy) = self.center;
        let inside = |c: f64| c - self.radius > 0.0 && c + self.radius < 1.0;
        if !(inside(cx) && inside(cy)) {
            return Err(Error::Config(format!(
                "perturbation support (center {:?}, radius {}) touches the periodic seam",
                self.center, self.radius
            )));
        }
        Ok(())
    }

    /// Bump value and horizontal gradient at `(x, y)` for box length `l`.
    pub fn bump(&self, l: f64, x: f64, y: f64) -> (f64, [f64; 2]) {
        bump(self.radius * l, x - self.center.0 * l, y - self.center.1 * l)
    }
}

/// Builds `(rho_0, m_0)` from the static profile, the planar target velocity
/// `v0` (two `nh x nh` fields) and the perturbation law.
pub fn well_prepared_data(
    scaling: &ScalingParams,
    profile: &StaticProfile,
    grid: &SlabGrid,
    v0: &[Vec<f64>; 2],
    perturbation: &PerturbationSpec,
) -> Result<State> {
    perturbation.validate()?;
    if profile.nv() != grid.nv {
        return Err(Error::Shape {
            expected: grid.nv,
            found: profile.nv(),
        });
    }
    for v in v0 {
        if v.len() != grid.layer() {
            return Err(Error::Shape {
                expected: grid.layer(),
                found: v.len(),
            });
        }
    }
    let pi = std::f64::consts::PI;
    let amp = perturbation.theta.map_or(0.0, |t| scaling.eps.powf(t));
    let mach = scaling.eps.powf(scaling.m);
    let n = grid.len();
    let mut rho = vec![0.0; n];
    let mut mom = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for k in 0..grid.nv {
        let z = grid.z(k);
        let (cz, sz) = ((pi * z).cos(), (pi * z).sin());
        for j in 0..grid.nh {
            for i in 0..grid.nh {
                let c = grid.idx(i, j, k);
                let h = j * grid.nh + i;
                let (b, db) = if amp > 0.0 {
                    perturbation.bump(grid.length, grid.x(i), grid.x(j))
                } else {
                    (0.0, [0.0; 2])
                };
                let r = profile.centers[k] + mach * amp * perturbation.density_amplitude * b;
                let wa = amp * perturbation.velocity_amplitude;
                let u = [v0[0][h] + wa * db[0] * cz, v0[1][h] + wa * db[1] * cz, -wa * pi * b * sz];
                rho[c] = r;
                for a in 0..3 {
                    mom[a][c] = r * u[a];
                }
            }
        }
    }
    State::new(*grid, rho, mom, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EosParams;
    use crate::statics::static_density;

    fn fixture(eps: f64) -> (SlabGrid, ScalingParams, StaticProfile) {
        let grid = SlabGrid::new(2.0 * std::f64::consts::PI, 16, 4).unwrap();
        let s = ScalingParams::new(eps, 3.0, 1.0).unwrap();
        let p = static_density(&s, &EosParams::default(), &grid).unwrap();
        (grid, s, p)
    }

    #[test]
    fn off_gives_anchor_plus_target() {
        let (grid, s, p) = fixture(0.3);
        let v0 = [vec![0.5; grid.layer()], vec![-0.25; grid.layer()]];
        let st = well_prepared_data(&s, &p, &grid, &v0, &PerturbationSpec::off()).unwrap();
        assert_eq!(st.rho, p.field(&grid));
        for c in 0..grid.len() {
            assert_eq!(st.mom[0][c], st.rho[c] * 0.5);
            assert_eq!(st.mom[2][c], 0.0);
        }
    }

    #[test]
    fn density_perturbation_scales_with_theta() {
        let v0 = [vec![0.0; 256], vec![0.0; 256]];
        let norm = |eps: f64| {
            let (grid, s, p) = fixture(eps);
            let st = well_prepared_data(&s, &p, &grid, &v0, &PerturbationSpec::default()).unwrap();
            let rt = p.field(&grid);
            let l2: f64 = st.rho.iter().zip(&rt).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * grid.cell_volume();
            // rho_0^(1) = (rho_0 - rho_tilde) / eps^m
            l2.sqrt() / eps.powi(3)
        };
        let ratio = norm(0.2) / norm(0.4);
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normal_momentum_vanishes_on_the_walls() {
        let spec = PerturbationSpec::default();
        // w_3 = -pi B sin(pi x3) is zero at x3 = 0, 1 and odd about both
        let l = 1.0;
        let (b, _) = spec.bump(l, 0.5, 0.5);
        assert_eq!(b, 1.0);
        let w3 = |z: f64| -std::f64::consts::PI * b * (std::f64::consts::PI * z).sin();
        assert!(w3(0.0).abs() < 1e-15 && w3(1.0).abs() < 1e-15);
        assert!((w3(0.1) + w3(-0.1)).abs() < 1e-15);
        assert!((w3(0.9) + w3(1.1)).abs() < 1e-14);
    }

    #[test]
    fn seam_contact_is_rejected() {
        let mut spec = PerturbationSpec::default();
        spec.center = (0.2, 0.5);
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
        spec.center = (0.5, 0.5);
        spec.radius = 0.5;
        assert!(spec.validate().is_err());
        spec.radius = 0.25;
        spec.theta = Some(0.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn bump_gradient_matches_finite_difference() {
        let spec = PerturbationSpec::default();
        let (x, y, h) = (0.61, 0.43, 1e-6);
        let (_, g) = spec.bump(1.0, x, y);
        let fx = (spec.bump(1.0, x + h, y).0 - spec.bump(1.0, x - h, y).0) / (2.0 * h);
        let fy = (spec.bump(1.0, x, y + h).0 - spec.bump(1.0, x, y - h).0) / (2.0 * h);
        assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6);
    }
}
