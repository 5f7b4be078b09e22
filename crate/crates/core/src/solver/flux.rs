use super::{FluxKind, SolverConfig, VACUUM_FLOOR};
use crate::eos::EosParams;
use crate::scaling::ScalingParams;
use crate::{Error, Result};

/// One cell of conservative data together with the static density there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub rho: f64,
    pub mom: [f64; 3],
    pub rho_ref: f64,
}

/// Scalar coefficients the face kernel needs, resolved once per step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coeffs {
    pub eos: EosParams,
    /// `eps^-2m`, or 0 with pressure off.
    pub pc: f64,
    pub delta: f64,
    pub big_gamma: f64,
    pub advection: bool,
    pub kind: FluxKind,
}

impl Coeffs {
    pub fn from_config(cfg: &SolverConfig) -> Self {
        Coeffs {
            eos: cfg.eos,
            pc: if cfg.terms.pressure {
                cfg.scaling.pressure_coeff()
            } else {
                0.0
            },
            delta: cfg.scaling.delta,
            big_gamma: cfg.scaling.big_gamma,
            advection: cfg.terms.advection,
            kind: cfg.flux,
        }
    }

    /// Pressure perturbation `eps^-2m (p(rho) - p(r)) + delta (rho^G - r^G)`.
    #[inline]
    pub fn dpress(&self, rho: f64, r: f64) -> f64 {
        let mut dp = self.pc * (self.eos.p(rho) - self.eos.p(r));
        if self.delta > 0.0 {
            dp += self.delta * (rho.powf(self.big_gamma) - r.powf(self.big_gamma));
        }
        dp
    }

    /// Effective (scaled) sound speed.
    #[inline]
    pub fn sound(&self, rho: f64) -> f64 {
        let mut c2 = self.pc * self.eos.dp(rho);
        if self.delta > 0.0 {
            c2 += self.delta * self.big_gamma * rho.powf(self.big_gamma - 1.0);
        }
        c2.sqrt()
    }
}

/// Per-cell primitive data used by the face kernel.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Prim {
    pub rho: f64,
    pub drho: f64,
    pub m: [f64; 3],
    pub u: [f64; 3],
    pub dp: f64,
    pub c: f64,
}

impl Prim {
    #[inline]
    pub fn new(c: &Coeffs, rho: f64, r: f64, m: [f64; 3]) -> Self {
        let inv = 1.0 / rho;
        Prim {
            rho,
            drho: rho - r,
            m,
            u: [m[0] * inv, m[1] * inv, m[2] * inv],
            dp: c.dpress(rho, r),
            c: c.sound(rho),
        }
    }

    /// Mirror image across a wall normal to `x_3`.
    #[inline]
    pub fn reflect(&self) -> Self {
        let mut g = *self;
        g.m[2] = -g.m[2];
        g.u[2] = -g.u[2];
        g
    }
}

/// Numerical flux `(mass, m_1, m_2, m_3)` through a face with normal `d`.
#[inline]
pub(crate) fn face_flux(c: &Coeffs, d: usize, l: &Prim, r: &Prim) -> [f64; 4] {
    let (unl, unr) = (l.u[d], r.u[d]);
    let adv = (unl.abs()).max(unr.abs());
    let s = adv + l.c.max(r.c);
    let ddrho = r.drho - l.drho;
    let mut f = [0.0; 4];
    f[0] = 0.5 * (l.m[d] + r.m[d]) - 0.5 * s * ddrho;
    for i in 0..3 {
        let mut central = 0.0;
        if c.advection {
            central += l.m[i] * unl + r.m[i] * unr;
        }
        if i == d {
            central += l.dp + r.dp;
        }
        let diss = match c.kind {
            FluxKind::Rusanov => s * (r.m[i] - l.m[i]),
            FluxKind::LowMach => {
                let ubar = 0.5 * (l.u[i] + r.u[i]);
                let rbar = 0.5 * (l.rho + r.rho);
                s * ubar * ddrho + adv * rbar * (r.u[i] - l.u[i])
            }
        };
        f[i + 1] = 0.5 * central - 0.5 * diss;
    }
    f
}

/// Numerical flux between two cells in direction `normal` (0, 1 or 2).
///
/// Uses the same kernel as the solver with every physical term active.
pub fn hyperbolic_flux(
    left: &CellState,
    right: &CellState,
    normal: usize,
    eos: &EosParams,
    scaling: &ScalingParams,
    kind: FluxKind,
) -> Result<[f64; 4]> {
    if normal > 2 {
        return Err(Error::Parameter(format!("face normal must be 0, 1 or 2, got {normal}")));
    }
    for cell in [left, right] {
        if !(cell.rho > VACUUM_FLOOR) {
            return Err(Error::StepRejected {
                time: f64::NAN,
                reason: format!("density {} at or below the vacuum floor", cell.rho),
                snapshot: None,
            });
        }
    }
    let mut cfg = SolverConfig::new(*eos, *scaling);
    cfg.flux = kind;
    let c = Coeffs::from_config(&cfg);
    let l = Prim::new(&c, left.rho, left.rho_ref, left.mom);
    let r = Prim::new(&c, right.rho, right.rho_ref, right.mom);
    Ok(face_flux(&c, normal, &l, &r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (EosParams, ScalingParams) {
        (EosParams::new(0.5, 2.0).unwrap(), ScalingParams::new(0.5, 3.0, 1.0).unwrap())
    }

    #[test]
    fn static_state_has_no_momentum_flux() {
        let (eos, s) = setup();
        for kind in [FluxKind::Rusanov, FluxKind::LowMach] {
            for d in 0..3 {
                let l = CellState { rho: 0.97, mom: [0.0; 3], rho_ref: 0.97 };
                let r = CellState { rho: 0.95, mom: [0.0; 3], rho_ref: 0.95 };
                let f = hyperbolic_flux(&l, &r, d, &eos, &s, kind).unwrap();
                assert_eq!(f, [0.0; 4]);
            }
        }
    }

    #[test]
    fn constant_state_is_consistent() {
        let (eos, s) = setup();
        let u = [0.3, -0.2, 0.1];
        let cell = CellState { rho: 1.0, mom: u, rho_ref: 1.0 };
        for kind in [FluxKind::Rusanov, FluxKind::LowMach] {
            for d in 0..3 {
                let f = hyperbolic_flux(&cell, &cell, d, &eos, &s, kind).unwrap();
                assert_eq!(f[0], u[d]);
                for i in 0..3 {
                    assert!((f[i + 1] - u[i] * u[d]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn rest_wave_speed_is_inverse_mach() {
        let (eos, s) = setup();
        let c = Coeffs::from_config(&SolverConfig::new(eos, s));
        assert_eq!(c.sound(1.0), 8.0);
        // mass flux across a density jump at rest is -s/2 * jump
        let l = CellState { rho: 1.0, mom: [0.0; 3], rho_ref: 1.0 };
        let r = CellState { rho: 1.01, mom: [0.0; 3], rho_ref: 1.0 };
        let f = hyperbolic_flux(&l, &r, 0, &eos, &s, FluxKind::Rusanov).unwrap();
        let smax = 8.0 * (1.01f64).sqrt();
        assert!((f[0] + 0.5 * smax * 0.01).abs() < 1e-14);
    }

    #[test]
    fn vacuum_is_rejected() {
        let (eos, s) = setup();
        let l = CellState { rho: 0.0, mom: [0.0; 3], rho_ref: 1.0 };
        let r = CellState { rho: 1.0, mom: [0.0; 3], rho_ref: 1.0 };
        assert!(matches!(
            hyperbolic_flux(&l, &r, 2, &eos, &s, FluxKind::Rusanov),
            Err(Error::StepRejected { .. })
        ));
        assert!(hyperbolic_flux(&r, &r, 3, &eos, &s, FluxKind::Rusanov).is_err());
    }

    #[test]
    fn wall_reflection_blocks_mass() {
        let (eos, s) = setup();
        let c = Coeffs::from_config(&SolverConfig::new(eos, s));
        let inner = Prim::new(&c, 1.02, 1.0, [0.1, 0.2, 0.3]);
        let ghost = inner.reflect();
        let f = face_flux(&c, 2, &ghost, &inner);
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], 0.0);
        assert_eq!(f[2], 0.0);
    }
}
