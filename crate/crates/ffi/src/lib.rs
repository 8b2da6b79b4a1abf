//! C ABI over the muskat core.
//!
//! Every entry point returns a [`MuskatStatus`]. On failure a human-readable message
//! is kept per thread and can be copied out with [`muskat_last_error`]. Handles are
//! opaque and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use muskat::curvature::mean_curvature;
use muskat::dn::{DnBackend, DnError, DnOptions, FixedPointSolver};
use muskat::elliptic::lyapunov_j;
use muskat::evolution::{run, EvolutionError, Model, MuskatParams as CoreParams, Nonlinearity, RunSpec, StepperSpec};
use muskat::norms::sobolev;
use muskat::spectral::{SpectralError, SpectralField, TorusGrid};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuskatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The data left the small-amplitude regime (degenerate geometry, lost contraction, rejected step).
    RegimeFailure = 3,
    NotConverged = 4,
    Panic = 5,
}

/// Periodic grid handle.
pub struct MuskatGrid(TorusGrid);

/// Real field handle, stored as Fourier coefficients on its grid.
pub struct MuskatField(SpectralField);

/// Fixed-point DN solver settings.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MuskatDnOptions {
    /// Vertical intervals.
    pub levels: usize,
    /// Depth of the vertical domain; values ≤ 0 keep the default depth.
    pub z_max: f64,
    pub tol: f64,
    pub max_iter: usize,
}

/// Physical constants. `galerkin_r <= 0` selects the dealiasing radius.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MuskatParams {
    pub kappa: f64,
    pub mu: f64,
    pub rho: f64,
    pub gravity: f64,
    pub surface_tension: f64,
    pub galerkin_r: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

struct Failure(MuskatStatus, String);

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Failure(MuskatStatus::InvalidArgument, e.to_string())
    }
}

impl From<DnError> for Failure {
    fn from(e: DnError) -> Self {
        let code = match e {
            _ if e.is_regime_failure() => MuskatStatus::RegimeFailure,
            DnError::NotConverged { .. } => MuskatStatus::NotConverged,
            _ => MuskatStatus::InvalidArgument,
        };
        Failure(code, e.to_string())
    }
}

impl From<EvolutionError> for Failure {
    fn from(e: EvolutionError) -> Self {
        let code = match &e {
            EvolutionError::Dn(d) if !d.is_regime_failure() => return Failure::from(d.clone()),
            _ if e.is_regime_failure() => MuskatStatus::RegimeFailure,
            _ => MuskatStatus::InvalidArgument,
        };
        Failure(code, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(MuskatStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting errors and panics into a status plus the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MuskatStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            MuskatStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            MuskatStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(MuskatStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(MuskatStatus::NullPointer, format!("{what} is null")))
}

fn core_dn_options(opts: Option<&MuskatDnOptions>) -> DnOptions {
    let mut core = DnOptions::default();
    if let Some(o) = opts {
        core.levels = o.levels;
        if o.z_max > 0.0 {
            core.z_max = o.z_max;
        }
        core.tol = o.tol;
        core.max_iter = o.max_iter;
    }
    core
}

fn solver_for(grid: &TorusGrid, opts: Option<&MuskatDnOptions>) -> Result<FixedPointSolver, Failure> {
    Ok(FixedPointSolver::new(grid, core_dn_options(opts))?)
}

fn boxed(field: SpectralField) -> *mut MuskatField {
    Box::into_raw(Box::new(MuskatField(field)))
}

/// Copies the last error of this thread, NUL-terminated and truncated to `capacity`.
/// Returns the full message length in bytes (excluding the NUL).
///
/// # Safety
/// `buffer` must be null or point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn muskat_last_error(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn muskat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Fills `out` with the default DN solver settings.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_dn_options_default(out: *mut MuskatDnOptions) -> MuskatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let d = DnOptions::default();
        *out = MuskatDnOptions { levels: d.levels, z_max: d.z_max, tol: d.tol, max_iter: d.max_iter };
        Ok(())
    })
}

/// Fills `out` with unit constants and the default cutoff.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_params_default(out: *mut MuskatParams) -> MuskatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let d = CoreParams::default();
        *out = MuskatParams { kappa: d.kappa, mu: d.mu, rho: d.rho, gravity: d.gravity, surface_tension: d.surface_tension, galerkin_r: 0.0 };
        Ok(())
    })
}

/// Creates a `dim`-dimensional grid with `n` points per side (power of two) and period `period`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_grid_new(dim: usize, n: usize, period: f64, out: *mut *mut MuskatGrid) -> MuskatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let grid = TorusGrid::new(dim, n, period)?;
        *out = Box::into_raw(Box::new(MuskatGrid(grid)));
        Ok(())
    })
}

/// Number of samples `n^dim` of the grid, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn muskat_grid_len(grid: *const MuskatGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must be null or a handle from `muskat_grid_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn muskat_grid_free(grid: *mut MuskatGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Builds a field from `len` row-major physical samples.
///
/// # Safety
/// `grid` must be a live handle, `samples` must point to `len` doubles, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_field_from_samples(grid: *const MuskatGrid, samples: *const f64, len: usize, out: *mut *mut MuskatField) -> MuskatStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        let out = out_ptr(out, "out")?;
        if samples.is_null() {
            return Err(Failure(MuskatStatus::NullPointer, "samples is null".into()));
        }
        let data = std::slice::from_raw_parts(samples, len);
        *out = boxed(SpectralField::from_samples(&grid.0, data)?);
        Ok(())
    })
}

/// Writes the physical samples of `field` into `buffer`, which must hold exactly the grid length.
///
/// # Safety
/// `field` must be a live handle and `buffer` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn muskat_field_to_samples(field: *const MuskatField, buffer: *mut f64, len: usize) -> MuskatStatus {
    guard(|| {
        let field = deref(field, "field")?;
        if buffer.is_null() {
            return Err(Failure(MuskatStatus::NullPointer, "buffer is null".into()));
        }
        let samples = field.0.to_samples();
        if samples.len() != len {
            return Err(invalid(format!("buffer holds {len} values, field has {}", samples.len())));
        }
        std::slice::from_raw_parts_mut(buffer, len).copy_from_slice(&samples);
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle produced by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn muskat_field_free(field: *mut MuskatField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Sobolev norm `‖f‖_{H^s}`; `s = 0` gives the L² norm.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_field_sobolev_norm(field: *const MuskatField, s: f64, out: *mut f64) -> MuskatStatus {
    guard(|| {
        let field = deref(field, "field")?;
        let out = out_ptr(out, "out")?;
        if !s.is_finite() {
            return Err(invalid("s must be finite"));
        }
        *out = sobolev(&field.0, s);
        Ok(())
    })
}

/// Applies the DN operator: `out = G(f) g`. `opts` may be null for defaults;
/// `iterations` may be null.
///
/// # Safety
/// `f` and `g` must be live handles on the same grid; `opts`, `iterations` null or valid.
#[no_mangle]
pub unsafe extern "C" fn muskat_dn_apply(
    f: *const MuskatField,
    g: *const MuskatField,
    opts: *const MuskatDnOptions,
    out: *mut *mut MuskatField,
    iterations: *mut usize,
) -> MuskatStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let g = deref(g, "g")?;
        let out = out_ptr(out, "out")?;
        f.0.check_grid(&g.0)?;
        let solver = solver_for(f.0.grid(), opts.as_ref())?;
        let sol = solver.solve(&f.0, &g.0)?;
        if let Some(it) = iterations.as_mut() {
            *it = sol.iterations;
        }
        *out = boxed(sol.g_f_g);
        Ok(())
    })
}

/// Mean curvature `H(f)`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_mean_curvature(f: *const MuskatField, out: *mut *mut MuskatField) -> MuskatStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(mean_curvature(&f.0).total);
        Ok(())
    })
}

/// Lyapunov functional `J(f) = ⟨H(f), G(f)f⟩`. `opts` may be null.
///
/// # Safety
/// `f` must be a live handle, `opts` null or valid, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_lyapunov_j(f: *const MuskatField, opts: *const MuskatDnOptions, out: *mut f64) -> MuskatStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let out = out_ptr(out, "out")?;
        let gff = solver_for(f.0.grid(), opts.as_ref())?.apply(&f.0, &f.0)?;
        *out = lyapunov_j(&f.0, &gff);
        Ok(())
    })
}

/// Evolves `f0` to `t_final` with the exponential integrator at step `dt`.
/// `params` and `opts` may be null for defaults; `steps` may be null.
///
/// # Safety
/// `f0` must be a live handle; pointer arguments null or valid as documented.
#[no_mangle]
pub unsafe extern "C" fn muskat_evolve(
    f0: *const MuskatField,
    params: *const MuskatParams,
    opts: *const MuskatDnOptions,
    dt: f64,
    t_final: f64,
    out: *mut *mut MuskatField,
    steps: *mut usize,
) -> MuskatStatus {
    guard(|| {
        let f0 = deref(f0, "f0")?;
        let out = out_ptr(out, "out")?;
        if !(dt > 0.0 && dt.is_finite() && t_final >= 0.0 && t_final.is_finite()) {
            return Err(invalid(format!("need dt > 0 and t_final ≥ 0, got dt = {dt}, t_final = {t_final}")));
        }
        let core_params = match params.as_ref() {
            None => CoreParams::default(),
            Some(p) => CoreParams {
                kappa: p.kappa,
                mu: p.mu,
                rho: p.rho,
                gravity: p.gravity,
                surface_tension: p.surface_tension,
                galerkin_r: (p.galerkin_r > 0.0).then_some(p.galerkin_r),
            },
        };
        let grid = f0.0.grid();
        let solver = solver_for(grid, opts.as_ref())?;
        let model = Model::new(grid, core_params, &solver, Nonlinearity::Full)?;
        let spec = StepperSpec { dt, ..StepperSpec::default() };
        let run_spec = RunSpec { t_final, save_every: usize::MAX, store_states: false, energy_residual: false, ..RunSpec::default() };
        let outcome = run(&f0.0, &model, &spec, &run_spec, |_, _| {});
        if let Some(s) = steps.as_mut() {
            *s = outcome.steps;
        }
        if let Some(e) = outcome.error {
            return Err(e.into());
        }
        *out = boxed(outcome.final_state.f);
        Ok(())
    })
}
