//! C ABI over `algdyn`.
//!
//! Polynomials and systems are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`AlgdynStatus`]; on failure a message is kept per thread and can be read
//! with [`algdyn_last_error_message`]. Output pointers are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use algdyn::classify::{is_et, SystemPresentation};
use algdyn::cli::{load_system, CliError};
use algdyn::entropy::{mahler_1d_jensen, mahler_2d, sublattice_entropy, EntropyResult, QuadratureConfig};
use algdyn::laurent::{parse_poly, IntLaurentPoly, LaurentError};
use algdyn::lattice::SublatticeBasis;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    NumericFailure = 5,
    Panic = 6,
}

/// Integer Laurent polynomial.
pub struct AlgdynPoly(IntLaurentPoly);

/// System presented by `f(u1, u2)` and `g(u3)`.
pub struct AlgdynSystem(SystemPresentation);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgdynValue {
    pub value: f64,
    pub error: f64,
    /// Set when the error comes from a convergence test.
    pub heuristic: bool,
    pub converged: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgdynEntropyKind {
    Finite = 0,
    /// A multiple of `log M(g)`; `value` holds `log M(g)`.
    MultipleOfLogMahlerG = 1,
    /// Sub-action of the `(u1, u2)`-plane; `value` is NaN.
    PlanarStructural = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgdynEntropy {
    pub kind: AlgdynEntropyKind,
    pub value: AlgdynValue,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgdynEtReport {
    pub is_expanding: bool,
    pub margin: f64,
    pub is_triangular: bool,
    pub a: i64,
    pub is_et: bool,
}

/// Quadrature settings; zeroed fields take the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgdynQuadrature {
    pub nodes: usize,
    pub depth: u32,
    pub tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AlgdynStatus, String);

impl From<LaurentError> for Failure {
    fn from(e: LaurentError) -> Self {
        let status = match e {
            LaurentError::Syntax { .. }
            | LaurentError::NonIntegerCoefficient { .. }
            | LaurentError::VariableOutOfRange { .. } => AlgdynStatus::ParseError,
            LaurentError::RootRadius { .. } | LaurentError::RootNoConvergence => AlgdynStatus::NumericFailure,
            _ => AlgdynStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Routes library errors through the command-line split into input and
/// numeric failures.
fn classify<E: Into<CliError>>(e: E) -> Failure {
    match e.into() {
        CliError::Input(m) => Failure(AlgdynStatus::InvalidInput, m),
        e @ CliError::Numeric(_) => Failure(AlgdynStatus::NumericFailure, e.to_string()),
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AlgdynStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AlgdynStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            AlgdynStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(AlgdynStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(AlgdynStatus::InvalidUtf8, e.to_string()))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

fn quadrature(q: *const AlgdynQuadrature) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    // SAFETY: checked for null; the caller guarantees validity otherwise
    if let Some(q) = unsafe { q.as_ref() } {
        if q.nodes != 0 {
            cfg.nodes = q.nodes;
        }
        if q.depth != 0 {
            cfg.depth = q.depth;
        }
        if q.tolerance != 0.0 {
            cfg.tolerance = q.tolerance;
        }
    }
    cfg
}

fn to_value(v: &algdyn::entropy::MahlerValue) -> AlgdynValue {
    AlgdynValue { value: v.value, error: v.error, heuristic: v.heuristic, converged: v.converged }
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn algdyn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses `text` as a Laurent polynomial in `arity` variables `u1..`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_poly_parse(text: *const c_char, arity: usize, out: *mut *mut AlgdynPoly) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let p = parse_poly(self::text(text)?, arity)?;
        *dst = Box::into_raw(Box::new(AlgdynPoly(p)));
        Ok(())
    })
}

/// # Safety
/// `poly` must come from this library and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn algdyn_poly_free(poly: *mut AlgdynPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Canonical text of `poly`; release it with `algdyn_string_free`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_poly_format(poly: *const AlgdynPoly, out: *mut *mut c_char) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let p = handle(poly)?;
        *dst = CString::new(p.0.to_string()).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn algdyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Logarithmic Mahler measure of a polynomial in one or two variables.
/// `quad` may be NULL.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_mahler(
    poly: *const AlgdynPoly,
    quad: *const AlgdynQuadrature,
    out: *mut AlgdynValue,
) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let p = &handle(poly)?.0;
        let v = match p.arity() {
            1 => mahler_1d_jensen(p).map_err(classify)?,
            2 => mahler_2d(p, &quadrature(quad)).map_err(classify)?,
            n => return Err(Failure(AlgdynStatus::InvalidInput, format!("expected one or two variables, got {n}"))),
        };
        *dst = to_value(&v);
        Ok(())
    })
}

/// Builds a system from the texts of `f(u1, u2)` and `g(u3)`.
///
/// # Safety
/// The strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_system_create(
    name: *const c_char,
    f: *const c_char,
    g: *const c_char,
    out: *mut *mut AlgdynSystem,
) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let s = SystemPresentation::parse(text(name)?, text(f)?, text(g)?).map_err(|e| match e {
            algdyn::classify::ClassifyError::Laurent(l) => Failure::from(l),
            other => classify(other),
        })?;
        *dst = Box::into_raw(Box::new(AlgdynSystem(s)));
        Ok(())
    })
}

/// Reads a system file of `key = "value"` lines.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_system_load(path: *const c_char, out: *mut *mut AlgdynSystem) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let s = load_system(Path::new(text(path)?)).map_err(classify)?;
        *dst = Box::into_raw(Box::new(AlgdynSystem(s)));
        Ok(())
    })
}

/// # Safety
/// `system` must come from this library and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn algdyn_system_free(system: *mut AlgdynSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_system_is_et(system: *const AlgdynSystem, out: *mut AlgdynEtReport) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let r = is_et(&handle(system)?.0).map_err(classify)?;
        *dst = AlgdynEtReport {
            is_expanding: r.is_expanding,
            margin: r.margin,
            is_triangular: r.is_triangular,
            a: r.a,
            is_et: r.is_et,
        };
        Ok(())
    })
}

/// Entropy of the sub-action of the subgroup spanned by the rows
/// `basis[0..3]` and `basis[3..6]`. `quad` may be NULL.
///
/// # Safety
/// `system` must be a live handle, `basis` must point to six integers and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn algdyn_sublattice_entropy(
    system: *const AlgdynSystem,
    basis: *const i64,
    quad: *const AlgdynQuadrature,
    out: *mut AlgdynEntropy,
) -> AlgdynStatus {
    guard(|| {
        let dst = self::out(out)?;
        let s = &handle(system)?.0;
        if basis.is_null() {
            return Err(null());
        }
        let b = std::slice::from_raw_parts(basis, 6);
        let lattice = SublatticeBasis::new([[b[0], b[1], b[2]], [b[3], b[4], b[5]]])
            .map_err(|e| Failure(AlgdynStatus::InvalidInput, e.to_string()))?;
        let r = sublattice_entropy(s, &lattice, &quadrature(quad)).map_err(classify)?;
        *dst = match &r {
            EntropyResult::Finite(v) => AlgdynEntropy { kind: AlgdynEntropyKind::Finite, value: to_value(v) },
            EntropyResult::MultipleOfLogMahlerG { base, .. } => {
                AlgdynEntropy { kind: AlgdynEntropyKind::MultipleOfLogMahlerG, value: to_value(base) }
            }
            EntropyResult::PlanarStructural { .. } => AlgdynEntropy {
                kind: AlgdynEntropyKind::PlanarStructural,
                value: AlgdynValue { value: f64::NAN, error: 0.0, heuristic: false, converged: true },
            },
        };
        Ok(())
    })
}
