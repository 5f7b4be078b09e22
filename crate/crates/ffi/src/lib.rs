//! C ABI over the slabflow primitive solver.
//!
//! Every function returns an [`SfStatus`]; on failure the message is kept
//! per thread and read back with [`sf_last_error_message`]. Handles are
//! opaque and must be released with [`sf_simulation_free`]. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use slabflow::domain::{write_snapshot, Snapshot, State};
use slabflow::harness::{build_profile, well_prepared_data, ExperimentConfig};
use slabflow::solver::PrimitiveSolver;
use slabflow::target::TargetSolver;
use slabflow::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// A primitive-solver run at one eps.
pub struct SfSimulation {
    solver: PrimitiveSolver,
    state: State,
    eps_record: [f64; 3],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::Config(_) | Error::Format(_) => SfStatus::Config,
        Error::Parameter(_) | Error::Domain(_) | Error::Shape { .. } | Error::TimeGrid(_) | Error::Insufficient(_) => {
            SfStatus::InvalidArgument
        }
        Error::Io { .. } => SfStatus::Io,
        _ => SfStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SfStatus>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            SfStatus::Panic
        }
    }
}

trait Fallible<T> {
    fn status(self) -> Result<T, SfStatus>;
}

impl<T> Fallible<T> for slabflow::Result<T> {
    fn status(self) -> Result<T, SfStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn invalid(msg: &str) -> SfStatus {
    set_error(msg);
    SfStatus::InvalidArgument
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SfStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(SfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string argument is not UTF-8"))
}

unsafe fn sim_ref<'a>(sim: *const SfSimulation) -> Result<&'a SfSimulation, SfStatus> {
    sim.as_ref().ok_or_else(|| {
        set_error("null simulation handle");
        SfStatus::NullPointer
    })
}

unsafe fn sim_mut<'a>(sim: *mut SfSimulation) -> Result<&'a mut SfSimulation, SfStatus> {
    sim.as_mut().ok_or_else(|| {
        set_error("null simulation handle");
        SfStatus::NullPointer
    })
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), SfStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(SfStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

fn build(config: &ExperimentConfig, eps: f64) -> slabflow::Result<SfSimulation> {
    config.validate()?;
    let grid = config.grid()?;
    let scaling = config.scaling_for(eps)?;
    let profile = build_profile(config, eps)?;
    let target = TargetSolver::new(grid.nh, grid.length, &config.target, config.solver.target_max_dt)?;
    let state = well_prepared_data(&scaling, &profile, &grid, &target.state.v, &config.perturbation)?;
    Ok(SfSimulation {
        solver: PrimitiveSolver::new(config.solver_config(eps)?, profile)?,
        state,
        eps_record: scaling.eps_record(),
    })
}

unsafe fn create(config: ExperimentConfig, eps: f64, out: *mut *mut SfSimulation) -> Result<(), SfStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(SfStatus::NullPointer);
    }
    let sim = build(&config, eps).status()?;
    out.write(Box::into_raw(Box::new(sim)));
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New simulation from the built-in preset (`"default"` or `"ns"`) at `eps`.
///
/// # Safety
/// `preset` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_new_preset(
    preset: *const c_char,
    eps: f64,
    out: *mut *mut SfSimulation,
) -> SfStatus {
    guard(|| {
        let name = str_arg(preset)?;
        let config = ExperimentConfig::preset(name).status()?;
        create(config, eps, out)
    })
}

/// New simulation from TOML config text at `eps`.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_new_from_toml(
    toml: *const c_char,
    eps: f64,
    out: *mut *mut SfSimulation,
) -> SfStatus {
    guard(|| {
        let text = str_arg(toml)?;
        let config = ExperimentConfig::from_toml(text).status()?;
        create(config, eps, out)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sim` must come from a constructor of this library and not be used after.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_free(sim: *mut SfSimulation) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Takes `steps` steps at the stable time step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_step(sim: *mut SfSimulation, steps: u32) -> SfStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        for _ in 0..steps {
            let dt = s.solver.stable_dt(&s.state);
            s.state = s.solver.step(&s.state, dt).status()?.0;
        }
        Ok(())
    })
}

/// Advances to time `t` (no-op when already there).
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_advance_to(sim: *mut SfSimulation, t: f64) -> SfStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        if !(t >= s.state.time) || !t.is_finite() {
            return Err(invalid(&format!("cannot advance from t = {} to {t}", s.state.time)));
        }
        while s.state.time < t {
            let dt = s.solver.stable_dt(&s.state).min(t - s.state.time);
            let mut next = s.solver.step(&s.state, dt).status()?.0;
            if t - next.time <= 1e-14 * t.max(1.0) {
                next.time = t;
            }
            s.state = next;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_time(sim: *const SfSimulation, out: *mut f64) -> SfStatus {
    guard(|| write_out(out, sim_ref(sim)?.state.time))
}

/// Total energy (kinetic plus potential relative to the static state).
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_energy(sim: *const SfSimulation, out: *mut f64) -> SfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        write_out(out, s.solver.energy(&s.state).status()?)
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_mass(sim: *const SfSimulation, out: *mut f64) -> SfStatus {
    guard(|| write_out(out, sim_ref(sim)?.state.total_mass()))
}

/// Horizontal and vertical cell counts.
///
/// # Safety
/// `sim` must be a live handle; `nh` and `nv` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_dims(sim: *const SfSimulation, nh: *mut usize, nv: *mut usize) -> SfStatus {
    guard(|| {
        let g = sim_ref(sim)?.state.grid;
        write_out(nh, g.nh)?;
        write_out(nv, g.nv)
    })
}

/// Copies field `component` (0 density, 1..=3 momentum) into `buf`, which
/// must hold exactly `nh * nh * nv` values in `(k, j, i)` order.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_copy_field(
    sim: *const SfSimulation,
    component: u32,
    buf: *mut f64,
    len: usize,
) -> SfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let field = match component {
            0 => &s.state.rho,
            1..=3 => &s.state.mom[component as usize - 1],
            _ => return Err(invalid(&format!("component {component} out of range 0..=3"))),
        };
        if buf.is_null() {
            set_error("null buffer");
            return Err(SfStatus::NullPointer);
        }
        if len != field.len() {
            return Err(invalid(&format!("buffer holds {len} values, field has {}", field.len())));
        }
        ptr::copy_nonoverlapping(field.as_ptr(), buf, len);
        Ok(())
    })
}

/// Writes the current state as a snapshot file.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sf_simulation_write_snapshot(sim: *const SfSimulation, path: *const c_char) -> SfStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let p = str_arg(path)?;
        write_snapshot(Path::new(p), &Snapshot::from_state(&s.state, Some(s.eps_record))).status()
    })
}
