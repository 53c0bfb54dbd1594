//! C interface: opaque matrix-set handles, status codes, and a per-thread
//! last-error message. Matrices cross the boundary as row-major `double`
//! arrays of real and (optional) imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jsr_core::bounds::{bracket_with, BracketOptions};
use jsr_core::certify::{build_certificate_with, LambdaInput};
use jsr_core::{Budget, JsrError, Matrix, MatrixSet, C64};

/// Status returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsrStatus {
    Ok = 0,
    InvalidInput = 1,
    NullPointer = 2,
    Budget = 3,
    Inconclusive = 4,
    Precondition = 5,
    Numerical = 6,
    Panic = 7,
}

/// Opaque finite set of d×d complex matrices.
pub struct JsrMatrixSet {
    inner: MatrixSet,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct JsrBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth_n: usize,
    /// Length of the word attaining `lower`.
    pub witness_len: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct JsrCertificate {
    pub theta: f64,
    pub lambda: f64,
    pub delta_c: f64,
    pub psi: f64,
    pub tau: f64,
    pub omega: f64,
    pub n0: usize,
    pub radius_exponent: u32,
    pub rho_lower: f64,
    pub rho_upper: f64,
    /// Certified radius at n0.
    pub radius_at_n0: f64,
    /// Lower guarantee on ρ of any set within `radius_at_n0`.
    pub guarantee_at_n0: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &JsrError) -> JsrStatus {
    match e {
        JsrError::InvalidInput(_) | JsrError::DimensionMismatch { .. } => JsrStatus::InvalidInput,
        JsrError::BudgetExceeded { .. } => JsrStatus::Budget,
        JsrError::Inconclusive { .. } => JsrStatus::Inconclusive,
        JsrError::Precondition(_) => JsrStatus::Precondition,
        JsrError::Numerical(_) => JsrStatus::Numerical,
    }
}

enum Fail {
    Core(JsrError),
    Null(&'static str),
}

impl From<JsrError> for Fail {
    fn from(e: JsrError) -> Self {
        Fail::Core(e)
    }
}

fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> JsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            JsrStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            JsrStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            JsrStatus::Panic
        }
    }
}

fn budget_of(budget: u64) -> Budget {
    if budget == 0 {
        Budget::default()
    } else {
        Budget(budget)
    }
}

/// Reads `count` row-major d×d matrices. `im` may be null for real input.
unsafe fn read_matrices(d: usize, count: usize, re: *const f64, im: *const f64) -> Result<Vec<Matrix>, Fail> {
    if re.is_null() {
        return Err(Fail::Null("re"));
    }
    let len = d
        .checked_mul(d)
        .and_then(|x| x.checked_mul(count))
        .ok_or_else(|| JsrError::InvalidInput("matrix data size overflows".into()))?;
    let re = std::slice::from_raw_parts(re, len);
    let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, len));
    (0..count)
        .map(|m| {
            let data = (0..d * d)
                .map(|i| {
                    let at = m * d * d + i;
                    C64::new(re[at], im.map_or(0.0, |v| v[at]))
                })
                .collect();
            Matrix::new(d, data).map_err(Fail::from)
        })
        .collect()
}

/// Creates a set from `count` row-major d×d matrices stored back to back.
/// `im` may be null. On success `*out` owns a handle for `jsr_set_free`.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `count·d·d` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsr_set_new(
    d: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut JsrMatrixSet,
) -> JsrStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = std::ptr::null_mut();
        if d == 0 || count == 0 {
            return Err(JsrError::InvalidInput("need d ≥ 1 and at least one matrix".into()).into());
        }
        let inner = MatrixSet::new(read_matrices(d, count, re, im)?)?;
        *out = Box::into_raw(Box::new(JsrMatrixSet { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `set` must come from `jsr_set_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jsr_set_free(set: *mut JsrMatrixSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Matrix dimension, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jsr_set_dim(set: *const JsrMatrixSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.dim())
}

/// Number of distinct members, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jsr_set_len(set: *const JsrMatrixSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Lower and upper JSR bounds from products of length ≤ n. A zero
/// `budget` selects the default product budget.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsr_bracket(set: *const JsrMatrixSet, n: usize, budget: u64, out: *mut JsrBracket) -> JsrStatus {
    guarded(|| {
        let set = set.as_ref().ok_or(Fail::Null("set"))?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let br = bracket_with(
            &set.inner,
            n,
            &BracketOptions {
                budget: budget_of(budget),
                ..Default::default()
            },
        )?;
        *out = JsrBracket {
            lower: br.lower,
            upper: br.upper,
            depth_n: br.depth_n,
            witness_len: br.witness.len(),
        };
        Ok(())
    })
}

/// Spectral radius of one row-major d×d matrix. `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to d·d doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn jsr_spectral_radius(d: usize, re: *const f64, im: *const f64, out: *mut f64) -> JsrStatus {
    guarded(|| {
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        if d == 0 {
            return Err(JsrError::InvalidInput("need d ≥ 1".into()).into());
        }
        let a = read_matrices(d, 1, re, im)?.remove(0);
        *out = a.spectral_radius();
        Ok(())
    })
}

/// Builds a local Hölder certificate. With `empirical_lambda` non-zero the
/// rate constant is fitted from products up to `kmax` and `lambda` is
/// ignored; otherwise `lambda` is taken as given.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jsr_certificate(
    set: *const JsrMatrixSet,
    lambda: f64,
    empirical_lambda: i32,
    r: u32,
    kmax: usize,
    horizon: usize,
    budget: u64,
    out: *mut JsrCertificate,
) -> JsrStatus {
    guarded(|| {
        let set = set.as_ref().ok_or(Fail::Null("set"))?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let lambda = if empirical_lambda != 0 {
            LambdaInput::Empirical { depth: kmax }
        } else {
            LambdaInput::Supplied(lambda)
        };
        let c = build_certificate_with(&set.inner, lambda, r, kmax, horizon, budget_of(budget))?;
        *out = JsrCertificate {
            theta: c.theta,
            lambda: c.lambda,
            delta_c: c.delta_c,
            psi: c.psi,
            tau: c.tau,
            omega: c.omega,
            n0: c.n0,
            radius_exponent: c.radius_exponent,
            rho_lower: c.rho_bracket.lower,
            rho_upper: c.rho_bracket.upper,
            radius_at_n0: c.radius(c.n0),
            guarantee_at_n0: c.guarantee(c.n0),
        };
        Ok(())
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn jsr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jsr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
