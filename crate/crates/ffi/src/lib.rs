//! C interface to springnet.
//!
//! Every fallible function returns an [`SnStatus`] and writes its result
//! through an out pointer. After a non-zero status, `sn_last_error_message`
//! copies a description of the most recent error on the calling thread.
//! Simulations are opaque handles created by `sn_*_new` and released with
//! `sn_*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use springnet::bifurcation::{analyze, beta_critical, Classification};
use springnet::dispersion::{f_alpha_beta, DimensionlessParams};
use springnet::micro::{init, InitialPositions, MicroParams, ParticleNetworkState};
use springnet::potential::hooke_shape;
use springnet::spectral::{InitialData, MacroParams, MacroSolver};
use springnet::specfun::{bessel_j, struve_h};
use springnet::{Error, HookeParams, PeriodicDomain};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Precondition = 3,
    NumericalGuard = 4,
    NonFinite = 5,
    Positivity = 6,
    Assumption = 7,
    Degenerate = 8,
    LeftPerturbativeRegime = 9,
    NoInstability = 10,
    Io = 11,
    Panic = 12,
}

impl From<&Error> for SnStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => SnStatus::InvalidArgument,
            Error::Precondition(_) => SnStatus::Precondition,
            Error::NumericalGuard(_) => SnStatus::NumericalGuard,
            Error::NonFinite(_) => SnStatus::NonFinite,
            Error::Positivity { .. } => SnStatus::Positivity,
            Error::Assumption(_) => SnStatus::Assumption,
            Error::Degenerate(_) => SnStatus::Degenerate,
            Error::LeftPerturbativeRegime { .. } => SnStatus::LeftPerturbativeRegime,
            Error::NoInstability(_) => SnStatus::NoInstability,
            Error::Io(_) => SnStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), SnError>>(f: F) -> SnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SnStatus::Ok,
        Ok(Err(SnError::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SnStatus::NullPointer
        }
        Ok(Err(SnError::Core(e))) => {
            set_error(e.to_string());
            SnStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SnStatus::Panic
        }
    }
}

enum SnError {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for SnError {
    fn from(e: Error) -> Self {
        SnError::Core(e)
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, SnError> {
    p.as_mut().ok_or(SnError::Null(what))
}

unsafe fn inp<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, SnError> {
    p.as_ref().ok_or(SnError::Null(what))
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes). Returns the full message length, so a
/// caller can size a buffer with a first call on `buf = NULL, len = 0`.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sn_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sn_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Bessel function `J_order(x)`, `order` in 0..=2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_bessel_j(order: u32, x: f64, out_value: *mut f64) -> SnStatus {
    guard(|| {
        *out(out_value, "out_value")? = bessel_j(order, x)?;
        Ok(())
    })
}

/// Struve function `H_order(x)`, `order` in 0..=1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_struve_h(order: u32, x: f64, out_value: *mut f64) -> SnStatus {
    guard(|| {
        *out(out_value, "out_value")? = struve_h(order, x)?;
        Ok(())
    })
}

/// Dispersion function `F(z) = z^2 + beta z^2 G(alpha, z)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_dispersion(alpha: f64, beta: f64, z: f64, out_value: *mut f64) -> SnStatus {
    guard(|| {
        let p = DimensionlessParams::new(alpha, beta)?;
        *out(out_value, "out_value")? = f_alpha_beta(p, z);
        Ok(())
    })
}

/// Shape function `G(alpha, z)` of the Hookean potential's transform.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_hooke_shape(alpha: f64, z: f64, out_value: *mut f64) -> SnStatus {
    guard(|| {
        *out(out_value, "out_value")? = hooke_shape(alpha, z);
        Ok(())
    })
}

/// Critical coupling of mode (1,0) on `[-l1, l1] x [-l2, l2]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_beta_critical(radius: f64, alpha: f64, l1: f64, l2: f64, out_value: *mut f64) -> SnStatus {
    guard(|| {
        let dom = PeriodicDomain::new(l1, l2)?;
        *out(out_value, "out_value")? = beta_critical(radius, alpha, &dom)?;
        Ok(())
    })
}

/// Onset classification.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnClassification {
    Supercritical = 0,
    Subcritical = 1,
}

/// Summary of a bifurcation analysis. Absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SnBifurcation {
    pub beta_c: f64,
    pub beta: f64,
    pub lambda_10: f64,
    pub c: f64,
    /// Cross coefficient; NaN on a non-square rectangle.
    pub d: f64,
    pub classification: SnClassification,
    pub stationary_amplitude: f64,
    /// 1 when every modelling assumption held.
    pub assumptions_ok: u8,
}

/// Analyses the onset at `beta`; pass NaN to use `beta_c`. Requires `l1 >= l2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_bifurcation_analyze(
    radius: f64,
    alpha: f64,
    l1: f64,
    l2: f64,
    beta: f64,
    out_report: *mut SnBifurcation,
) -> SnStatus {
    guard(|| {
        let dom = PeriodicDomain::new(l1, l2)?;
        let r = analyze(radius, alpha, &dom, (!beta.is_nan()).then_some(beta))?;
        *out(out_report, "out_report")? = SnBifurcation {
            beta_c: r.beta_c,
            beta: r.beta,
            lambda_10: r.lambda_10(),
            c: r.c,
            d: r.d.unwrap_or(f64::NAN),
            classification: match r.classification {
                Classification::Supercritical => SnClassification::Supercritical,
                Classification::Subcritical => SnClassification::Subcritical,
            },
            stationary_amplitude: r.stationary_amplitude.unwrap_or(f64::NAN),
            assumptions_ok: r.assumptions_ok as u8,
        };
        Ok(())
    })
}

/// Particle model parameters on `[-l1, l1] x [-l2, l2]`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SnMicroParams {
    pub n: usize,
    pub kappa: f64,
    pub l0: f64,
    pub radius: f64,
    pub diffusion: f64,
    pub mu: f64,
    pub nu_f: f64,
    pub nu_d: f64,
    pub dt: f64,
    pub l1: f64,
    pub l2: f64,
}

impl SnMicroParams {
    fn to_core(self) -> Result<MicroParams, Error> {
        let p = MicroParams {
            n: self.n,
            hooke: HookeParams::new(self.kappa, self.l0, self.radius)?,
            diffusion: self.diffusion,
            mu: self.mu,
            nu_f: self.nu_f,
            nu_d: self.nu_d,
            dt: self.dt,
            domain: PeriodicDomain::new(self.l1, self.l2)?,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Opaque particle simulation.
pub struct SnMicroSim {
    params: MicroParams,
    state: ParticleNetworkState,
}

/// Creates a simulation with uniformly drawn positions and no links.
///
/// # Safety
/// `params` and `out_sim` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_new(params: *const SnMicroParams, seed: u64, out_sim: *mut *mut SnMicroSim) -> SnStatus {
    guard(|| {
        let slot = out(out_sim, "out_sim")?;
        *slot = ptr::null_mut();
        let params = inp(params, "params")?.to_core()?;
        let state = init(&params, seed, &InitialPositions::Uniform)?;
        *slot = Box::into_raw(Box::new(SnMicroSim { params, state }));
        Ok(())
    })
}

/// Releases a simulation. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or come from `sn_micro_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_free(sim: *mut SnMicroSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances `steps` time steps.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_step(sim: *mut SnMicroSim, steps: u64) -> SnStatus {
    guard(|| {
        let s = out(sim, "sim")?;
        for _ in 0..steps {
            s.state.step(&s.params)?;
        }
        Ok(())
    })
}

/// Current time.
///
/// # Safety
/// `sim` must be a live handle; returns NaN on NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_time(sim: *const SnMicroSim) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.time)
}

/// Number of live links.
///
/// # Safety
/// `sim` must be a live handle; returns 0 on NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_link_count(sim: *const SnMicroSim) -> usize {
    sim.as_ref().map_or(0, |s| s.state.link_count())
}

/// Total spring energy of the live links.
///
/// # Safety
/// `sim` must be a live handle; returns NaN on NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_energy(sim: *const SnMicroSim) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.energy(&s.params))
}

/// Copies positions as `x1, x2` pairs into `buf`, which holds `len` doubles
/// (at least `2 n`).
///
/// # Safety
/// `sim` must be a live handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sn_micro_positions(sim: *const SnMicroSim, buf: *mut f64, len: usize) -> SnStatus {
    guard(|| {
        let s = inp(sim, "sim")?;
        if buf.is_null() {
            return Err(SnError::Null("buf"));
        }
        let n = s.state.positions.len();
        if len < 2 * n {
            return Err(Error::InvalidArgument(format!("buffer holds {len} doubles, need {}", 2 * n)).into());
        }
        let dst = std::slice::from_raw_parts_mut(buf, 2 * n);
        for (k, p) in s.state.positions.iter().enumerate() {
            dst[2 * k] = p[0];
            dst[2 * k + 1] = p[1];
        }
        Ok(())
    })
}

/// Macro solver parameters. `n1`, `n2` are powers of two, at least 16.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SnMacroParams {
    pub gamma: f64,
    pub kappa: f64,
    pub l0: f64,
    pub radius: f64,
    pub l1: f64,
    pub l2: f64,
    pub n1: usize,
    pub n2: usize,
    pub dt: f64,
    /// Non-zero enables 2/3-rule dealiasing.
    pub dealias: u8,
}

/// One cosine perturbation `eps cos(pi k1 x1 / L1 + pi k2 x2 / L2)` of the
/// uniform density.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SnCosineMode {
    pub k1: i64,
    pub k2: i64,
    pub eps: f64,
}

/// Opaque macro solver.
pub struct SnMacroSolver {
    solver: MacroSolver,
}

/// Creates a solver started from the uniform density plus `n_modes` cosines.
///
/// # Safety
/// `params` and `out_solver` must be valid; `modes` must point to `n_modes`
/// entries or be NULL when `n_modes` is 0.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_new(
    params: *const SnMacroParams,
    modes: *const SnCosineMode,
    n_modes: usize,
    out_solver: *mut *mut SnMacroSolver,
) -> SnStatus {
    guard(|| {
        let slot = out(out_solver, "out_solver")?;
        *slot = ptr::null_mut();
        let q = inp(params, "params")?;
        let p = MacroParams {
            gamma: q.gamma,
            hooke: HookeParams::new(q.kappa, q.l0, q.radius)?,
            domain: PeriodicDomain::new(q.l1, q.l2)?,
            n1: q.n1,
            n2: q.n2,
            dt: q.dt,
            dealias: q.dealias != 0,
        };
        p.validate()?;
        let seeds: &[SnCosineMode] = if n_modes == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(inp(modes, "modes")?, n_modes)
        };
        let initial = InitialData::Cosines {
            modes: seeds.iter().map(|m| (m.k1, m.k2, m.eps)).collect(),
        }
        .build(&p)?;
        let solver = MacroSolver::new(p, initial)?;
        *slot = Box::into_raw(Box::new(SnMacroSolver { solver }));
        Ok(())
    })
}

/// Releases a solver. NULL is ignored.
///
/// # Safety
/// `solver` must be NULL or come from `sn_macro_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_free(solver: *mut SnMacroSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Advances `steps` time steps. Stops at the first failing step; the state
/// is left as it was before that step.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_step(solver: *mut SnMacroSolver, steps: u64) -> SnStatus {
    guard(|| {
        let s = out(solver, "solver")?;
        for _ in 0..steps {
            s.solver.step()?;
        }
        Ok(())
    })
}

/// Current time.
///
/// # Safety
/// `solver` must be a live handle; returns NaN on NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_time(solver: *const SnMacroSolver) -> f64 {
    solver.as_ref().map_or(f64::NAN, |s| s.solver.time())
}

/// Total mass of the density.
///
/// # Safety
/// `solver` must be a live handle; returns NaN on NULL.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_mass(solver: *const SnMacroSolver) -> f64 {
    solver.as_ref().map_or(f64::NAN, |s| s.solver.field().mass())
}

/// Fourier coefficient of mode `(k1, k2)`.
///
/// # Safety
/// `solver`, `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_mode(solver: *const SnMacroSolver, k1: i64, k2: i64, re: *mut f64, im: *mut f64) -> SnStatus {
    guard(|| {
        let s = inp(solver, "solver")?;
        let f = s.solver.field();
        let (h1, h2) = (f.n1 as i64 / 2, f.n2 as i64 / 2);
        if k1.abs() >= h1 || k2.abs() >= h2 {
            return Err(Error::InvalidArgument(format!("mode ({k1}, {k2}) outside the grid")).into());
        }
        let v = f.get(k1, k2);
        *out(re, "re")? = v.re;
        *out(im, "im")? = v.im;
        Ok(())
    })
}

/// Free energy of the current density.
///
/// # Safety
/// `solver` and `out_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sn_macro_free_energy(solver: *mut SnMacroSolver, out_value: *mut f64) -> SnStatus {
    guard(|| {
        let s = out(solver, "solver")?;
        *out(out_value, "out_value")? = s.solver.free_energy()?;
        Ok(())
    })
}
