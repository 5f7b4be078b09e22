//! Isentropic equation of state `p(rho) = a rho^gamma`, its pressure potential
//! `P(rho) = rho * int_1^rho p(z)/z^2 dz`, and the density cutoff `chi` used to
//! split integrands into essential and residual parts.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EosParams {
    pub a: f64,
    pub gamma: f64,
}

impl EosParams {
    pub fn new(a: f64, gamma: f64) -> Result<Self> {
        let eos = EosParams { a, gamma };
        eos.validate()?;
        Ok(eos)
    }

    /// `a = 1/gamma`, so that `p'(1) = 1`.
    pub fn normalized(gamma: f64) -> Result<Self> {
        Self::new(1.0 / gamma, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Parameter(format!(
                "pressure coefficient a must be positive, got {}",
                self.a
            )));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "adiabatic exponent gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        (self.a * self.gamma - 1.0).abs() <= 1e-15
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.p(rho))
    }

    pub fn pressure_potential(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.potential(rho))
    }

    /// `p'(rho)`.
    pub fn pressure_derivative(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.dp(rho))
    }

    /// `(P'(rho), P''(rho))`.
    pub fn potential_derivatives(&self, rho: f64) -> Result<(f64, f64)> {
        check_density(rho)?;
        if rho == 0.0 && self.gamma < 2.0 {
            return Err(Error::Singular(format!(
                "P''(0) is unbounded for gamma = {} < 2",
                self.gamma
            )));
        }
        Ok((self.dpotential(rho), self.d2potential(rho)))
    }

    // Unchecked kernels for the solver loops; callers guarantee rho >= 0.

    #[inline]
    pub(crate) fn p(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    /// `p'(rho) = a gamma rho^(gamma-1)`.
    #[inline]
    pub(crate) fn dp(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    #[inline]
    pub(crate) fn potential(&self, rho: f64) -> f64 {
        self.a * (rho.powf(self.gamma) - rho) / (self.gamma - 1.0)
    }

    #[inline]
    pub(crate) fn dpotential(&self, rho: f64) -> f64 {
        self.a * (self.gamma * rho.powf(self.gamma - 1.0) - 1.0) / (self.gamma - 1.0)
    }

    #[inline]
    pub(crate) fn d2potential(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 2.0)
    }

    /// Bregman gap `P(rho) - P(r) - P'(r)(rho - r)`, nonnegative by convexity.
    #[inline]
    pub(crate) fn bregman(&self, rho: f64, r: f64) -> f64 {
        self.potential(rho) - self.potential(r) - self.dpotential(r) * (rho - r)
    }
}

impl Default for EosParams {
    fn default() -> Self {
        EosParams { a: 0.5, gamma: 2.0 }
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("density must be nonnegative, got {rho}")))
    }
}

/// Smooth density cutoff: `chi = 1` on `inner`, `chi = 0` outside `outer`,
/// quintic smoothstep blends in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: (f64, f64),
    pub outer: (f64, f64),
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff {
            inner: (0.5, 2.0),
            outer: (0.25, 4.0),
        }
    }
}

/// `6t^5 - 15t^4 + 10t^3`, clamped to `[0, 1]`.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

impl Cutoff {
    pub fn new(inner: (f64, f64), outer: (f64, f64)) -> Result<Self> {
        let ok = 0.0 <= outer.0 && outer.0 < inner.0 && inner.0 < inner.1 && inner.1 < outer.1;
        if !ok {
            return Err(Error::Parameter(format!(
                "cutoff intervals must nest as 0 <= lo_out < lo_in < hi_in < hi_out, got inner {inner:?}, outer {outer:?}"
            )));
        }
        Ok(Cutoff { inner, outer })
    }

    pub fn chi(&self, rho: f64) -> f64 {
        let (lo_out, hi_out) = self.outer;
        let (lo_in, hi_in) = self.inner;
        if rho <= lo_out || rho >= hi_out {
            0.0
        } else if rho < lo_in {
            smoothstep((rho - lo_out) / (lo_in - lo_out))
        } else if rho <= hi_in {
            1.0
        } else {
            1.0 - smoothstep((rho - hi_in) / (hi_out - hi_in))
        }
    }
}

/// Splits `h` into `(c h, (1 - c) h)` for `c` in `[0, 1]` with `ess + res == h`
/// bitwise: whichever part is at least `h/2` is formed by an exact
/// (Sterbenz) subtraction from the other.
#[inline]
pub(crate) fn split_exact(c: f64, h: f64) -> (f64, f64) {
    let e = c * h;
    let r = h - e;
    if e.abs() * 2.0 < h.abs() {
        (h - r, r)
    } else {
        (e, r)
    }
}

/// `([h]_ess, [h]_res) = (chi(rho) h, (1 - chi(rho)) h)`, computed so that the
/// two parts add back to `h` exactly.
pub fn ess_res_split(h: &[f64], rho: &[f64], chi: &Cutoff) -> Result<(Vec<f64>, Vec<f64>)> {
    if h.len() != rho.len() {
        return Err(Error::Shape {
            expected: h.len(),
            found: rho.len(),
        });
    }
    let mut ess = Vec::with_capacity(h.len());
    let mut res = Vec::with_capacity(h.len());
    for (&hv, &r) in h.iter().zip(rho) {
        let (e, rv) = split_exact(chi.chi(r), hv);
        ess.push(e);
        res.push(rv);
    }
    Ok((ess, res))
}
