//! C ABI over `ising-qfi`.
//!
//! Every fallible function returns an [`IqStatus`]; on failure the message is
//! kept per thread and can be copied out with [`iq_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ising_qfi::asymptotics::{asymptotic_check, prefactor, Curve, DEFAULT_QUADRATURE_TOL};
use ising_qfi::fermion::{generator_spectrum, ghz_variance_b, max_variance};
use ising_qfi::oracle::{
    integrated_generator, make_state, variance_of, IntegratedGenerator, MatrixModel, ModelKind,
    StateKind, StateVector,
};
use ising_qfi::product::{optimize, NelderMeadOptions, OptRun, ProductStateAngles};
use ising_qfi::{Error, ModelParams, Target};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    TooLarge = 3,
    DimensionMismatch = 4,
    UnsupportedMode = 5,
    NotNormalized = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqTarget {
    EstimateJ = 0,
    EstimateB = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqModel {
    SpinOpen = 0,
    SpinPeriodic = 1,
    FermionCyclic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqCurve {
    /// Optimal-state prefactor G(g).
    OptimalG = 0,
    /// GHZ prefactor F(g).
    GhzF = 1,
}

/// Chain size, couplings and evolution time.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqParams {
    pub n: usize,
    pub j: f64,
    pub b: f64,
    pub t: f64,
}

/// Integrated generator of one coupling on the dense `2^N` model.
pub struct IqGenerator {
    inner: IntegratedGenerator,
}

/// Result of a multi-start product-state optimization.
pub struct IqOptRun {
    inner: OptRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(IqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => IqStatus::Domain,
            Error::TooLarge { .. } => IqStatus::TooLarge,
            Error::DimensionMismatch { .. } => IqStatus::DimensionMismatch,
            Error::UnsupportedMode { .. } => IqStatus::UnsupportedMode,
            Error::NotNormalized(_) => IqStatus::NotNormalized,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(IqStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IqStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IqStatus::Panic
        }
    }
}

impl From<IqTarget> for Target {
    fn from(t: IqTarget) -> Self {
        match t {
            IqTarget::EstimateJ => Target::EstimateJ,
            IqTarget::EstimateB => Target::EstimateB,
        }
    }
}

impl From<IqModel> for ModelKind {
    fn from(m: IqModel) -> Self {
        match m {
            IqModel::SpinOpen => ModelKind::SpinOpen,
            IqModel::SpinPeriodic => ModelKind::SpinPeriodic,
            IqModel::FermionCyclic => ModelKind::FermionCyclic,
        }
    }
}

unsafe fn read_params(params: *const IqParams) -> Result<ModelParams, Fail> {
    let p = params.as_ref().ok_or_else(|| null("params"))?;
    Ok(ModelParams::new(p.n, p.j, p.b, p.t)?)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length plus one,
/// or 0 if there is no error recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn iq_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Largest variance of the integrated generator over all states.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_max_variance(
    params: *const IqParams,
    target: IqTarget,
    out: *mut f64,
) -> IqStatus {
    guard(|| {
        let p = read_params(params)?;
        write(out, max_variance(&p, target.into()).variance)
    })
}

/// Exact GHZ variance of the field generator on the cyclic fermion model.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_ghz_variance_b(params: *const IqParams, out: *mut f64) -> IqStatus {
    guard(|| {
        let p = read_params(params)?;
        write(out, ghz_variance_b(&p).variance)
    })
}

/// Per-mode generator singular values `s_k`; `out` needs room for `n` values.
///
/// # Safety
/// `params` must be valid and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_spectrum(
    params: *const IqParams,
    target: IqTarget,
    out: *mut f64,
    len: usize,
) -> IqStatus {
    guard(|| {
        let p = read_params(params)?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        if len < p.n() {
            return Err(Fail(
                IqStatus::BufferTooSmall,
                format!("need {} values, buffer holds {len}", p.n()),
            ));
        }
        let s = generator_spectrum(&p, target.into());
        ptr::copy_nonoverlapping(s.values.as_ptr(), out, s.values.len());
        Ok(())
    })
}

/// `G(g)` or `F(g)` for `g ≥ 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_prefactor(curve: IqCurve, g: f64, out: *mut f64) -> IqStatus {
    guard(|| {
        let c = match curve {
            IqCurve::OptimalG => Curve::OptimalG,
            IqCurve::GhzF => Curve::GhzF,
        };
        write(out, prefactor(c, g, DEFAULT_QUADRATURE_TOL)?)
    })
}

/// `max_variance / (N² t²)` minus the large-`N` prefactor.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_asymptotic_check(
    params: *const IqParams,
    target: IqTarget,
    out: *mut f64,
) -> IqStatus {
    guard(|| {
        let p = read_params(params)?;
        write(out, asymptotic_check(&p, target.into())?)
    })
}

/// Builds the dense integrated generator. Free with [`iq_generator_free`].
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_new(
    params: *const IqParams,
    target: IqTarget,
    model: IqModel,
    out: *mut *mut IqGenerator,
) -> IqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output handle"));
        }
        let p = read_params(params)?;
        let m = MatrixModel::new(model.into(), p.n())?;
        let inner = integrated_generator(&p, target.into(), &m)?;
        out.write(Box::into_raw(Box::new(IqGenerator { inner })));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`iq_generator_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_free(handle: *mut IqGenerator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Hilbert-space dimension `2^N`, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live generator.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_dim(handle: *const IqGenerator) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.model().dim())
}

/// `λ_max − λ_min` of the generator.
///
/// # Safety
/// `handle` must be a live generator and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_gap(handle: *const IqGenerator, out: *mut f64) -> IqStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("generator"))?;
        write(out, h.inner.spectral_gap())
    })
}

/// Variance of the generator after evolving the state with amplitudes
/// `re[i] + i im[i]`, `len = 2^N`.
///
/// # Safety
/// `re` and `im` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_variance(
    handle: *const IqGenerator,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut f64,
) -> IqStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("generator"))?;
        if re.is_null() || im.is_null() {
            return Err(null("amplitude buffer"));
        }
        let (re, im) = (
            std::slice::from_raw_parts(re, len),
            std::slice::from_raw_parts(im, len),
        );
        let state = StateVector::from_parts(re, im)?;
        write(out, variance_of(&state, &h.inner)?.variance)
    })
}

/// Variance for the product state with interleaved angles
/// `[θ_1, φ_1, …, θ_N, φ_N]`, `len = 2N`.
///
/// # Safety
/// `angles` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn iq_generator_product_variance(
    handle: *const IqGenerator,
    angles: *const f64,
    len: usize,
    out: *mut f64,
) -> IqStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("generator"))?;
        if angles.is_null() {
            return Err(null("angles"));
        }
        let a = ProductStateAngles::from_interleaved(std::slice::from_raw_parts(angles, len))?;
        let state = make_state(&StateKind::Product(a), h.inner.model().n())?;
        write(out, variance_of(&state, &h.inner)?.variance)
    })
}

/// Multi-start product-state optimization with default simplex settings.
/// Free with [`iq_optrun_free`].
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_optimize(
    params: *const IqParams,
    target: IqTarget,
    model: IqModel,
    restarts: usize,
    seed: u64,
    out: *mut *mut IqOptRun,
) -> IqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output handle"));
        }
        let p = read_params(params)?;
        let m = MatrixModel::new(model.into(), p.n())?;
        let inner = optimize(&p, target.into(), &m, restarts, seed, &NelderMeadOptions::default())?;
        out.write(Box::into_raw(Box::new(IqOptRun { inner })));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`iq_optimize`], freed once.
#[no_mangle]
pub unsafe extern "C" fn iq_optrun_free(handle: *mut IqOptRun) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Best variance found, or NaN for a null handle.
///
/// # Safety
/// `handle` must be null or a live run.
#[no_mangle]
pub unsafe extern "C" fn iq_optrun_best_variance(handle: *const IqOptRun) -> f64 {
    handle.as_ref().map_or(f64::NAN, |h| h.inner.best_variance)
}

/// Number of restarts whose simplex met the diameter tolerance.
///
/// # Safety
/// `handle` must be null or a live run.
#[no_mangle]
pub unsafe extern "C" fn iq_optrun_restarts_converged(handle: *const IqOptRun) -> usize {
    handle.as_ref().map_or(0, |h| h.inner.restarts_converged())
}

/// Copies the best interleaved angles (`2N` values) into `out`.
///
/// # Safety
/// `handle` must be a live run and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iq_optrun_best_angles(
    handle: *const IqOptRun,
    out: *mut f64,
    len: usize,
) -> IqStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("run"))?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let angles = h.inner.best_angles.interleaved();
        if len < angles.len() {
            return Err(Fail(
                IqStatus::BufferTooSmall,
                format!("need {} values, buffer holds {len}", angles.len()),
            ));
        }
        ptr::copy_nonoverlapping(angles.as_ptr(), out, angles.len());
        Ok(())
    })
}
