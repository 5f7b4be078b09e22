//! Numerical laboratory for the multiscale rotating compressible Euler /
//! Navier–Stokes system on a slab `[0, L)^2 x (0, 1)` and its singular limit,
//! the 2D incompressible Euler equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`eos`]: isentropic pressure law, pressure potential, density cutoff.
//! * [`domain`]: slab grid, cell-averaged state, boundary filling, quadrature,
//!   snapshot files.
//! * [`scaling`]: the `(eps, m, n, alpha, delta, Gamma)` regime record.
//! * [`statics`]: hydrostatic profiles `(rho_tilde, 0)`.
//! * [`solver`]: well-balanced finite-volume integrator for the primitive system.
//! * [`target`]: pseudo-spectral 2D Euler solver and the corrector `q`.
//! * [`diagnostics`]: relative energy, coercivity, budget terms, weak residuals.
//! * [`harness`]: well-prepared data, eps-sweeps, rate fits and artifacts.

pub mod diagnostics;
pub mod domain;
pub mod eos;
pub mod error;
pub mod harness;
pub mod scaling;
pub mod solver;
pub mod statics;
pub mod target;

pub(crate) mod sum;

pub use error::{Error, Result};
