//! C ABI for the Norden identity checker.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns a
//! [`NordenStatus`] and, on failure, records a message retrievable with
//! [`norden_last_error_message`] on the same thread. Strings handed out by
//! the library must be released with [`norden_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use norden::manifest::{load_manifest, ManifoldManifest};
use norden::report::{emit_report, ReportFormat};
use norden::tensor::DenseTensor;
use norden::{run_suite, CheckStatus, Error, LieFrameManifold, VerificationReport};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NordenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Shape = 5,
    InvalidManifold = 6,
    Numeric = 7,
    Refused = 8,
    Utf8 = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NordenCheckStatus {
    Pass = 0,
    Fail = 1,
    NotApplicable = 2,
}

pub struct NordenManifold {
    manifest: ManifoldManifest,
    manifold: LieFrameManifold,
}

pub struct NordenReport {
    report: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NordenStatus {
    match e {
        Error::Argument(_) => NordenStatus::InvalidArgument,
        Error::Numeric(_) => NordenStatus::Numeric,
        Error::InvalidManifold(_) => NordenStatus::InvalidManifold,
        Error::Refused(_) => NordenStatus::Refused,
        Error::Io { .. } => NordenStatus::Io,
        Error::Parse(_) => NordenStatus::Parse,
        Error::Shape(_) => NordenStatus::Shape,
    }
}

fn fail(status: NordenStatus, msg: impl Into<String>) -> NordenStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), NordenStatus>) -> NordenStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NordenStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(NordenStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: norden::Result<T>) -> Result<T, NordenStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, NordenStatus> {
    if p.is_null() {
        return Err(fail(NordenStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NordenStatus::Utf8, format!("{what} is not UTF-8")))
}

fn check_out<T>(out: *mut *mut T) -> Result<(), NordenStatus> {
    if out.is_null() {
        return Err(fail(NordenStatus::NullPointer, "output pointer is null"));
    }
    Ok(())
}

fn into_handle(manifest: ManifoldManifest) -> Result<*mut NordenManifold, NordenStatus> {
    let manifold = lift(manifest.to_manifold())?;
    Ok(Box::into_raw(Box::new(NordenManifold { manifest, manifold })))
}

/// Message for the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn norden_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string of the identity suite.
#[no_mangle]
pub extern "C" fn norden_suite_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(norden::suite::SUITE_VERSION).expect("no nul"))
        .as_ptr()
}

/// Loads a JSON manifest from `path`.
#[no_mangle]
pub unsafe extern "C" fn norden_manifold_load(
    path: *const c_char,
    out: *mut *mut NordenManifold,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let path = c_str(path, "path")?;
        let handle = into_handle(lift(load_manifest(Path::new(path)))?)?;
        *out = handle;
        Ok(())
    })
}

/// Parses a JSON manifest held in memory.
#[no_mangle]
pub unsafe extern "C" fn norden_manifold_from_json(
    json: *const c_char,
    out: *mut *mut NordenManifold,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let text = c_str(json, "json")?;
        let handle = into_handle(lift(ManifoldManifest::from_json(text))?)?;
        *out = handle;
        Ok(())
    })
}

/// Builds a manifold from row-major arrays: `structure_constants[(k*dim + i)*dim + j]`
/// is the `e_k` component of `[e_i, e_j]`, `metric` and `j` are `dim*dim`.
#[no_mangle]
pub unsafe extern "C" fn norden_manifold_from_arrays(
    id: *const c_char,
    dim: usize,
    structure_constants: *const f64,
    metric: *const f64,
    j: *const f64,
    out: *mut *mut NordenManifold,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let id = if id.is_null() { "unnamed" } else { c_str(id, "id")? };
        if structure_constants.is_null() || metric.is_null() || j.is_null() {
            return Err(fail(NordenStatus::NullPointer, "array pointer is null"));
        }
        if dim == 0 || dim > 64 {
            return Err(fail(NordenStatus::InvalidArgument, format!("unsupported dimension {dim}")));
        }
        let c = std::slice::from_raw_parts(structure_constants, dim * dim * dim).to_vec();
        let g = std::slice::from_raw_parts(metric, dim * dim);
        let jm = std::slice::from_raw_parts(j, dim * dim);
        let c = lift(DenseTensor::from_vec(dim, 3, c))?;
        let g = nalgebra::DMatrix::from_row_slice(dim, dim, g);
        let jm = nalgebra::DMatrix::from_row_slice(dim, dim, jm);
        let manifold = lift(LieFrameManifold::new(c, g, jm))?;
        let manifest = ManifoldManifest::from_manifold(id, &manifold, None);
        *out = Box::into_raw(Box::new(NordenManifold { manifest, manifold }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn norden_manifold_dim(m: *const NordenManifold) -> usize {
    m.as_ref().map_or(0, |m| m.manifold.dim())
}

/// Serializes the manifold as a manifest; release with [`norden_string_free`].
#[no_mangle]
pub unsafe extern "C" fn norden_manifold_to_json(
    m: *const NordenManifold,
    out: *mut *mut c_char,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let m = m
            .as_ref()
            .ok_or_else(|| fail(NordenStatus::NullPointer, "manifold is null"))?;
        *out = to_c_string(m.manifest.to_json());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn norden_manifold_free(m: *mut NordenManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs the identity suite. `tolerance <= 0` selects the library default.
/// An invalid manifold yields `NORDEN_STATUS_INVALID_MANIFOLD` and no report.
#[no_mangle]
pub unsafe extern "C" fn norden_verify(
    m: *const NordenManifold,
    tolerance: f64,
    out: *mut *mut NordenReport,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let m = m
            .as_ref()
            .ok_or_else(|| fail(NordenStatus::NullPointer, "manifold is null"))?;
        let tol = if tolerance <= 0.0 { norden::DEFAULT_TOLERANCE } else { tolerance };
        let report = lift(run_suite(&m.manifest.id, &m.manifold, tol))?;
        *out = Box::into_raw(Box::new(NordenReport { report }));
        Ok(())
    })
}

/// Class name (`KAHLER_W0`, `QUASI_KAHLER_W3` or `OTHER`); static storage.
#[no_mangle]
pub unsafe extern "C" fn norden_report_class(r: *const NordenReport) -> *const c_char {
    match r.as_ref().map(|r| r.report.class_label.class) {
        Some(norden::NordenClass::KahlerW0) => c"KAHLER_W0".as_ptr(),
        Some(norden::NordenClass::QuasiKahlerW3) => c"QUASI_KAHLER_W3".as_ptr(),
        Some(norden::NordenClass::Other) => c"OTHER".as_ptr(),
        None => ptr::null(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn norden_report_counts(
    r: *const NordenReport,
    pass: *mut usize,
    fail_count: *mut usize,
    not_applicable: *mut usize,
) -> NordenStatus {
    guard(|| {
        let r = r
            .as_ref()
            .ok_or_else(|| fail(NordenStatus::NullPointer, "report is null"))?;
        let count = |want: NordenCheckStatus| {
            r.report
                .checks
                .iter()
                .filter(|c| check_status(&c.status) == want)
                .count()
        };
        for (p, want) in [
            (pass, NordenCheckStatus::Pass),
            (fail_count, NordenCheckStatus::Fail),
            (not_applicable, NordenCheckStatus::NotApplicable),
        ] {
            if !p.is_null() {
                *p = count(want);
            }
        }
        Ok(())
    })
}

fn check_status(s: &CheckStatus) -> NordenCheckStatus {
    match s {
        CheckStatus::Pass => NordenCheckStatus::Pass,
        CheckStatus::Fail => NordenCheckStatus::Fail,
        CheckStatus::NotApplicable(_) => NordenCheckStatus::NotApplicable,
    }
}

/// Looks up one check by id. `residual` receives NaN when the check could not be formed.
#[no_mangle]
pub unsafe extern "C" fn norden_report_check(
    r: *const NordenReport,
    check_id: *const c_char,
    status: *mut NordenCheckStatus,
    residual: *mut f64,
) -> NordenStatus {
    guard(|| {
        let r = r
            .as_ref()
            .ok_or_else(|| fail(NordenStatus::NullPointer, "report is null"))?;
        let id = c_str(check_id, "check_id")?;
        let c = r
            .report
            .check(id)
            .ok_or_else(|| fail(NordenStatus::InvalidArgument, format!("unknown check id {id:?}")))?;
        if !status.is_null() {
            *status = check_status(&c.status);
        }
        if !residual.is_null() {
            *residual = c.residual.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Structured (JSON) or text rendering of a report; release with [`norden_string_free`].
#[no_mangle]
pub unsafe extern "C" fn norden_report_render(
    r: *const NordenReport,
    json: bool,
    out: *mut *mut c_char,
) -> NordenStatus {
    guard(|| {
        check_out(out)?;
        let r = r
            .as_ref()
            .ok_or_else(|| fail(NordenStatus::NullPointer, "report is null"))?;
        let format = if json { ReportFormat::Structured } else { ReportFormat::Text };
        *out = to_c_string(emit_report(&r.report, format));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn norden_report_free(r: *mut NordenReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nul removed")
        .into_raw()
}

#[no_mangle]
pub unsafe extern "C" fn norden_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
