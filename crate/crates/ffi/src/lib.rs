//! C ABI for `taildep`.
//!
//! Objects are opaque handles created by `td_*_new`/`td_*_parse` style
//! constructors and released with the matching `td_*_free`. Every fallible
//! function returns an `int32_t` status (`TD_OK` or a negative `TD_ERR_*`
//! code) and writes its result through an out-pointer. The message of the
//! most recent failure on the calling thread is available from
//! `td_last_error`.
//!
//! Handles are immutable after construction and may be shared across threads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use taildep::estimation::{self, BootstrapConfig, EstimatorGrids, PseudoSample};
use taildep::measures::{self, MeasureSpec};
use taildep::{Copula, Error, TailDependenceFunction};

pub const TD_OK: i32 = 0;
pub const TD_ERR_NULL_POINTER: i32 = -1;
pub const TD_ERR_INVALID_PARAMETER: i32 = -2;
pub const TD_ERR_DOMAIN: i32 = -3;
pub const TD_ERR_UNSUPPORTED_FAMILY: i32 = -4;
pub const TD_ERR_QUADRATURE: i32 = -5;
pub const TD_ERR_INVALID_SAMPLE: i32 = -6;
pub const TD_ERR_UNKNOWN_MEASURE: i32 = -7;
pub const TD_ERR_INVALID_TDF: i32 = -8;
pub const TD_ERR_INVALID_UTF8: i32 = -9;
pub const TD_ERR_PANIC: i32 = -10;

/// A bivariate copula.
pub struct TdCopula {
    inner: Copula,
}

/// A tail dependence function.
pub struct TdTdf {
    inner: TailDependenceFunction,
}

/// Pseudo-observations of a bivariate sample.
pub struct TdSample {
    inner: PseudoSample,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => TD_ERR_INVALID_PARAMETER,
        Error::Domain(_) => TD_ERR_DOMAIN,
        Error::UnsupportedFamily(_) => TD_ERR_UNSUPPORTED_FAMILY,
        Error::Quadrature { .. } => TD_ERR_QUADRATURE,
        Error::InvalidSample(_) => TD_ERR_INVALID_SAMPLE,
        Error::UnknownMeasure(_) => TD_ERR_UNKNOWN_MEASURE,
        Error::InvalidTdf(_) => TD_ERR_INVALID_TDF,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TD_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TD_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            TD_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(TD_ERR_INVALID_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failure on this thread; empty when none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn td_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a family expression (the CLI grammar, e.g. `smo:0.353,0.75`).
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_copula_parse(expr: *const c_char, out: *mut *mut TdCopula) -> i32 {
    guard(|| {
        let s = str_arg(expr, "expr")?;
        let c = taildep::cli::parse_family(s)?;
        put(out, Box::into_raw(Box::new(TdCopula { inner: c })), "out")
    })
}

/// # Safety
/// `c` must come from `td_copula_parse` and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn td_copula_free(c: *mut TdCopula) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// C(u, v).
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_copula_cdf(c: *const TdCopula, u: f64, v: f64, out: *mut f64) -> i32 {
    guard(|| {
        let c = obj(c, "copula")?;
        put(out, c.inner.cdf(u, v)?, "out")
    })
}

/// Draws `n` pairs into the caller-owned arrays `u_out` and `v_out`.
///
/// # Safety
/// `u_out` and `v_out` must each have room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn td_copula_sample(
    c: *const TdCopula,
    n: usize,
    seed: u64,
    u_out: *mut f64,
    v_out: *mut f64,
) -> i32 {
    guard(|| {
        let c = obj(c, "copula")?;
        if u_out.is_null() || v_out.is_null() {
            return Err(null("output array"));
        }
        let pts = c.inner.sample(n, seed)?;
        let us = std::slice::from_raw_parts_mut(u_out, n);
        let vs = std::slice::from_raw_parts_mut(v_out, n);
        for (i, (u, v)) in pts.into_iter().enumerate() {
            us[i] = u;
            vs[i] = v;
        }
        Ok(())
    })
}

/// Lower tail dependence function of a copula.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_copula_lower_tdf(c: *const TdCopula, out: *mut *mut TdTdf) -> i32 {
    guard(|| {
        let c = obj(c, "copula")?;
        put(out, Box::into_raw(Box::new(TdTdf { inner: c.inner.lower_tdf() })), "out")
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn td_tdf_free(t: *mut TdTdf) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Λ(u, v) for u, v ≥ 0.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_tdf_eval(t: *const TdTdf, u: f64, v: f64, out: *mut f64) -> i32 {
    guard(|| {
        let t = obj(t, "tdf")?;
        put(out, t.inner.try_eval(u, v)?, "out")
    })
}

/// Closed-route value of a named measure (`tdc`, `spearman`, `chi_star`, …).
/// `t_min` floors the λ̄ grid and `l` sets the b-grid; pass 0 for defaults.
///
/// # Safety
/// `t` must be a live handle, `measure` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn td_tdf_measure(
    t: *const TdTdf,
    measure: *const c_char,
    t_min: f64,
    l: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let t = obj(t, "tdf")?;
        let spec: MeasureSpec = str_arg(measure, "measure")?.parse()?;
        let t_min = if t_min > 0.0 { t_min } else { measures::DEFAULT_T_MIN_ANALYTIC };
        let l = if l > 0 { l } else { measures::DEFAULT_L };
        put(out, measures::evaluate(&t.inner, spec, t_min, l)?, "out")
    })
}

/// Pseudo-observations from `n` raw pairs (ranked), or from uniform values
/// of known margins when `pseudo` is nonzero.
///
/// # Safety
/// `x` and `y` must point to `n` doubles each.
#[no_mangle]
pub unsafe extern "C" fn td_sample_new(
    x: *const f64,
    y: *const f64,
    n: usize,
    pseudo: i32,
    out: *mut *mut TdSample,
) -> i32 {
    guard(|| {
        if x.is_null() || y.is_null() {
            return Err(null("data array"));
        }
        let xs = std::slice::from_raw_parts(x, n);
        let ys = std::slice::from_raw_parts(y, n);
        let pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let s = if pseudo != 0 { PseudoSample::from_uniform(&pairs)? } else { estimation::pseudo_observations(&pairs)? };
        put(out, Box::into_raw(Box::new(TdSample { inner: s })), "out")
    })
}

/// # Safety
/// `s` must come from `td_sample_new` and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn td_sample_free(s: *mut TdSample) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of observations.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn td_sample_len(s: *const TdSample, out: *mut usize) -> i32 {
    guard(|| put(out, obj(s, "sample")?.inner.n(), "out"))
}

/// Plateau choice of k in [k_min, k_max]; zeros select the default bounds.
/// `fallback` receives 1 when no plateau qualified.
///
/// # Safety
/// `s` must be a live handle; `k_out` valid; `fallback` may be null.
#[no_mangle]
pub unsafe extern "C" fn td_sample_plateau(
    s: *const TdSample,
    k_min: usize,
    k_max: usize,
    k_out: *mut usize,
    fallback: *mut i32,
) -> i32 {
    guard(|| {
        let s = obj(s, "sample")?;
        let (lo, hi) = estimation::default_plateau_bounds(s.inner.n());
        let p = estimation::plateau_find_k(
            &s.inner,
            if k_min > 0 { k_min } else { lo },
            if k_max > 0 { k_max } else { hi },
        )?;
        if !fallback.is_null() {
            fallback.write(p.fallback as i32);
        }
        put(k_out, p.k_star, "k_out")
    })
}

/// Plug-in estimate of a named measure at threshold k with default grids.
///
/// # Safety
/// `s` must be a live handle, `measure` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn td_sample_estimate(
    s: *const TdSample,
    k: usize,
    measure: *const c_char,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let s = obj(s, "sample")?;
        let m = str_arg(measure, "measure")?;
        put(out, estimation::estimate_measure(&s.inner, k, m, &EstimatorGrids::default())?, "out")
    })
}

/// Point estimate and percentile bootstrap interval (B replicates, fixed k).
///
/// # Safety
/// `s` must be a live handle, `measure` NUL-terminated, outputs valid.
#[no_mangle]
pub unsafe extern "C" fn td_sample_bootstrap(
    s: *const TdSample,
    k: usize,
    measure: *const c_char,
    replicates: usize,
    level: f64,
    seed: u64,
    estimate: *mut f64,
    ci_low: *mut f64,
    ci_high: *mut f64,
) -> i32 {
    guard(|| {
        let s = obj(s, "sample")?;
        let spec: MeasureSpec = str_arg(measure, "measure")?.parse()?;
        if estimate.is_null() || ci_low.is_null() || ci_high.is_null() {
            return Err(null("output"));
        }
        let cfg = BootstrapConfig { replicates, level, seed, rechoose_k: None };
        let r = estimation::bootstrap(&s.inner, k, &[spec], &cfg, &EstimatorGrids::default())?;
        estimate.write(r[0].estimate);
        ci_low.write(r[0].ci_low);
        ci_high.write(r[0].ci_high);
        Ok(())
    })
}
