//! C ABI over `torsym`.
//!
//! Every fallible call returns a [`TorsymStatus`]; on failure the message is
//! kept per thread and can be read with [`torsym_last_error_message`].
//! Strings handed out by this library must be released with [`torsym_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use torsym::certify::{self, CellErrorFormula, CertificationConfig};
use torsym::grid::GridOffset;
use torsym::symmetry::{self, SemiIntegralSearch};
use torsym::trigpoly::GradientBoundMode;
use torsym::{Error, TrigPolynomial};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsymStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    DimensionMismatch = 4,
    EmptyPolynomial = 5,
    InvalidConfig = 6,
    Unsupported = 7,
    Internal = 8,
}

/// Opaque polynomial handle.
pub struct TorsymPoly {
    inner: TrigPolynomial,
}

/// Grid certification settings. `gradient_override <= 0` uses the computed bound.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TorsymCertifyConfig {
    pub grid_log2: u32,
    pub gradient_override: f64,
    /// 0: full-diagonal cell error, 1: half-diagonal.
    pub half_diagonal: u8,
    /// 0: cell centers, 1: cell corners.
    pub zero_offset: u8,
    pub threshold_factor: f64,
    pub accuracy_budget_factor: f64,
    /// 0 uses every available core.
    pub threads: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TorsymCertifyResult {
    pub n_cells: u64,
    pub m_negative: u64,
    pub m_positive: u64,
    pub gradient_bound: f64,
    pub cell_error: f64,
    pub max_eval_error: f64,
    pub sound: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TorsymStatus {
    match e {
        Error::Malformed(_) | Error::Json(_) => TorsymStatus::Malformed,
        Error::DimensionMismatch { .. } => TorsymStatus::DimensionMismatch,
        Error::EmptyPolynomial => TorsymStatus::EmptyPolynomial,
        Error::InvalidConfig(_) => TorsymStatus::InvalidConfig,
        Error::NotInClassS { .. }
        | Error::NotABasis { .. }
        | Error::NotT2Eigenfunction(_)
        | Error::OrderTooLarge { .. } => TorsymStatus::Unsupported,
        Error::ExactCheckFailed { .. } | Error::Io(_) => TorsymStatus::Internal,
    }
}

/// Runs `body`, recording errors and converting panics to `Internal`.
fn guarded(body: impl FnOnce() -> Result<(), (TorsymStatus, String)>) -> TorsymStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TorsymStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TorsymStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (TorsymStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TorsymStatus, String) {
    (TorsymStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TorsymStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (TorsymStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn poly_ref<'a>(p: *const TorsymPoly) -> Result<&'a TrigPolynomial, (TorsymStatus, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("polynomial handle"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Owned by the library;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn torsym_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a polynomial JSON document into a new handle.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn torsym_poly_from_json(json: *const c_char, out: *mut *mut TorsymPoly) -> TorsymStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let inner = TrigPolynomial::parse(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TorsymPoly { inner }));
        Ok(())
    })
}

/// # Safety
/// `poly` must come from [`torsym_poly_from_json`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn torsym_poly_free(poly: *mut TorsymPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Dimension of the torus, or 0 for a null handle.
///
/// # Safety
/// `poly` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn torsym_poly_dim(poly: *const TorsymPoly) -> usize {
    poly.as_ref().map_or(0, |h| h.inner.dim())
}

/// Number of stored terms, or 0 for a null handle.
///
/// # Safety
/// `poly` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn torsym_poly_n_terms(poly: *const TorsymPoly) -> usize {
    poly.as_ref().map_or(0, |h| h.inner.terms().len())
}

/// Evaluates `f(x)` with a rigorous bound: `|f(x) - *value| <= *err`.
///
/// # Safety
/// `x` must point to `len` doubles; `value` and `err` must be writable (`err` may be null).
#[no_mangle]
pub unsafe extern "C" fn torsym_poly_evaluate(
    poly: *const TorsymPoly,
    x: *const f64,
    len: usize,
    value: *mut f64,
    err: *mut f64,
) -> TorsymStatus {
    guarded(|| {
        let f = poly_ref(poly)?;
        if x.is_null() {
            return Err(null("x"));
        }
        if value.is_null() {
            return Err(null("value"));
        }
        let point = std::slice::from_raw_parts(x, len);
        let enc = f.evaluate_with_error(point).map_err(lib_err)?;
        *value = enc.value;
        if !err.is_null() {
            *err = enc.err;
        }
        Ok(())
    })
}

/// Settings matching [`CertificationConfig::new`] at the given resolution.
#[no_mangle]
pub extern "C" fn torsym_certify_config_default(grid_log2: u32) -> TorsymCertifyConfig {
    let c = CertificationConfig::new(grid_log2);
    TorsymCertifyConfig {
        grid_log2,
        gradient_override: 0.0,
        half_diagonal: 0,
        zero_offset: 0,
        threshold_factor: c.threshold_factor,
        accuracy_budget_factor: c.accuracy_budget_factor,
        threads: 0,
    }
}

/// Certified negative/positive cell counts on the dyadic grid.
///
/// # Safety
/// `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn torsym_certify_signs(
    poly: *const TorsymPoly,
    config: *const TorsymCertifyConfig,
    out: *mut TorsymCertifyResult,
) -> TorsymStatus {
    guarded(|| {
        let f = poly_ref(poly)?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = CertificationConfig::new(c.grid_log2);
        if c.gradient_override > 0.0 {
            cfg.gradient_bound_mode = GradientBoundMode::Override(c.gradient_override);
        }
        if c.half_diagonal != 0 {
            cfg.cell_error_formula = CellErrorFormula::HalfDiagonal;
        }
        if c.zero_offset != 0 {
            cfg.offset = GridOffset::Zero;
        }
        cfg.threshold_factor = c.threshold_factor;
        cfg.accuracy_budget_factor = c.accuracy_budget_factor;
        let threads = (c.threads > 0).then_some(c.threads as usize);
        let cert = certify::certify_signs_with_threads(f, &cfg, threads).map_err(lib_err)?;
        *out = TorsymCertifyResult {
            n_cells: cert.n_cells,
            m_negative: cert.m_negative,
            m_positive: cert.m_positive,
            gradient_bound: cert.gradient_bound,
            cell_error: cert.e,
            max_eval_error: cert.max_eval_error,
            sound: cert.sound as u8,
        };
        Ok(())
    })
}

/// Searches for a half-integer translation `u` with `f(x + u) = -f(x)`.
///
/// On success `*json_out` holds either `{"found": true, "certificate": ...}` or
/// `{"found": false, "obstruction": ...}`; free it with [`torsym_string_free`].
///
/// # Safety
/// `json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn torsym_find_semi_integral(
    poly: *const TorsymPoly,
    json_out: *mut *mut c_char,
) -> TorsymStatus {
    guarded(|| {
        let f = poly_ref(poly)?;
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        *json_out = ptr::null_mut();
        let value = match symmetry::find_semi_integral(f) {
            SemiIntegralSearch::Found(cert) => {
                serde_json::json!({ "found": true, "certificate": cert.to_document(f) })
            }
            SemiIntegralSearch::Infeasible(obstruction) => {
                serde_json::json!({ "found": false, "obstruction": obstruction })
            }
        };
        *json_out = into_c_string(value.to_string());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn torsym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
