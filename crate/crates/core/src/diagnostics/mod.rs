//! Functionals evaluated over solver output: relative energy and its
//! coercivity, the relative energy budget, norm surrogates and weak-form
//! residuals.

mod budget;
mod coercivity;
mod norms;
mod relative_energy;
mod weak;

pub use budget::{BudgetAccumulator, BudgetReport};
pub use coercivity::{coercivity_check, coercivity_check_with, CoercivityCheck, COERCIVITY_CONSTANT};
pub use norms::{l1loc_velocity_error, norm_l2_lgamma};
pub use relative_energy::{relative_energy, RelativeEnergyReport};
pub use weak::{default_suite, weak_residuals, TestFunction, WeakResidualAccumulator, WeakResidualReport};
