//! Characteristic-number exponents of the scaled system.
//!
//! With `Ma = eps^m`, `Ro = eps`, `Fr = eps^n` and (viscous case)
//! `Re = eps^-alpha`, every stiff coefficient of the momentum equation is a
//! power of `eps`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub eps: f64,
    /// Mach exponent.
    pub m: f64,
    /// Froude exponent.
    pub n: f64,
    /// Reynolds exponent; `0` switches viscosity off.
    pub alpha: f64,
    /// Artificial-pressure coefficient; `0` switches it off.
    pub delta: f64,
    /// Artificial-pressure exponent.
    pub big_gamma: f64,
}

impl ScalingParams {
    /// Inviscid record without artificial pressure.
    pub fn new(eps: f64, m: f64, n: f64) -> Result<Self> {
        Self::full(eps, m, n, 0.0, 0.0, 2.0)
    }

    pub fn full(eps: f64, m: f64, n: f64, alpha: f64, delta: f64, big_gamma: f64) -> Result<Self> {
        let s = ScalingParams {
            eps,
            m,
            n,
            alpha,
            delta,
            big_gamma,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks `eps in (0, 1]`, the multiscale regime `m/2 > n >= 1`, and the
    /// viscous / artificial-pressure exponents.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::Config(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.n >= 1.0) {
            return Err(Error::Config(format!("need n >= 1, got n = {}", self.n)));
        }
        if !(self.m / 2.0 > self.n) {
            return Err(Error::Config(format!(
                "multiscale regime needs m/2 > n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Config(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.delta > 0.0 && !(self.big_gamma > 1.5) {
            return Err(Error::Config(format!(
                "artificial pressure needs Gamma > 3/2, got {}",
                self.big_gamma
            )));
        }
        Ok(())
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let s = ScalingParams { eps, ..*self };
        s.validate()?;
        Ok(s)
    }

    /// Stratification strength `eps^{2(m-n)}` of the static profile.
    #[inline]
    pub fn stratification(&self) -> f64 {
        self.eps.powf(2.0 * (self.m - self.n))
    }

    /// `eps^-m`, the acoustic speed-up.
    #[inline]
    pub fn inv_mach(&self) -> f64 {
        self.eps.powf(-self.m)
    }

    /// `eps^-2m`, the pressure coefficient.
    #[inline]
    pub fn pressure_coeff(&self) -> f64 {
        self.eps.powf(-2.0 * self.m)
    }

    /// `eps^-2n`, the gravity coefficient.
    #[inline]
    pub fn gravity_coeff(&self) -> f64 {
        self.eps.powf(-2.0 * self.n)
    }

    /// `1/eps`, the Coriolis coefficient.
    #[inline]
    pub fn coriolis_coeff(&self) -> f64 {
        1.0 / self.eps
    }

    /// `eps^alpha`, or `0` when viscosity is off.
    #[inline]
    pub fn viscous_coeff(&self) -> f64 {
        if self.alpha > 0.0 {
            self.eps.powf(self.alpha)
        } else {
            0.0
        }
    }

    pub fn eps_record(&self) -> [f64; 3] {
        [self.eps, self.m, self.n]
    }
}

/// Newtonian stress coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscosityParams {
    pub mu: f64,
    pub lambda: f64,
}

impl ViscosityParams {
    /// Spatial dimension entering the deviatoric projection.
    pub const DIM: f64 = 3.0;

    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        let v = ViscosityParams { mu, lambda };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu > 0.0 && self.lambda > 0.0 && self.mu.is_finite() && self.lambda.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "viscosities must be positive, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )))
        }
    }
}

impl Default for ViscosityParams {
    fn default() -> Self {
        ViscosityParams { mu: 1.0, lambda: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_is_enforced() {
        assert!(ScalingParams::new(0.2, 3.0, 1.0).is_ok());
        assert!(ScalingParams::new(0.2, 2.0, 1.0).is_err());
        assert!(ScalingParams::new(0.2, 3.0, 0.5).is_err());
        assert!(ScalingParams::new(0.0, 3.0, 1.0).is_err());
        assert!(ScalingParams::new(1.5, 3.0, 1.0).is_err());
        assert!(ScalingParams::new(1.0, 3.0, 1.0).is_ok());
        assert!(ScalingParams::full(0.2, 3.0, 1.0, 1.0, 0.1, 1.2).is_err());
        assert!(ScalingParams::full(0.2, 3.0, 1.0, -1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn coefficients() {
        let s = ScalingParams::new(0.5, 3.0, 1.0).unwrap();
        assert_eq!(s.stratification(), 0.0625);
        assert_eq!(s.inv_mach(), 8.0);
        assert_eq!(s.pressure_coeff(), 64.0);
        assert_eq!(s.gravity_coeff(), 4.0);
        assert_eq!(s.coriolis_coeff(), 2.0);
        assert_eq!(s.viscous_coeff(), 0.0);
        let v = ScalingParams::full(0.5, 3.0, 1.0, 1.0, 0.0, 2.0).unwrap();
        assert_eq!(v.viscous_coeff(), 0.5);
    }

    #[test]
    fn viscosity_positive() {
        assert!(ViscosityParams::new(1.0, 1.0).is_ok());
        assert!(ViscosityParams::new(0.0, 1.0).is_err());
        assert!(ViscosityParams::new(1.0, -1.0).is_err());
    }
}
