//! C ABI for `dendrite-lab`.
//!
//! Systems are opaque [`DlSystem`] handles created from the JSON system
//! format and released with [`dl_system_free`]. Every fallible call returns a
//! [`DlStatus`]; on failure [`dl_last_error_message`] describes the error for
//! the calling thread. Reports are returned as NUL-terminated JSON strings
//! owned by the caller and released with [`dl_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dendrite_lab::dimension::{dimension_report, moran_dimension, DEFAULT_COVER_DEPTHS};
use dendrite_lab::geometry::Point;
use dendrite_lab::io::parse_system_file;
use dendrite_lab::tree::{point_order, DEFAULT_STABILIZATION_DEPTH};
use dendrite_lab::validator::{validate_system, PolyhedralSystem};
use dendrite_lab::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSystem = 4,
    NotADendrite = 5,
    BudgetExceeded = 6,
    Computation = 7,
    Panic = 8,
}

/// Opaque handle to a parsed system of similarities.
pub struct DlSystem {
    sys: PolyhedralSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> DlStatus {
    match err {
        Error::Parse { .. } | Error::Map { .. } | Error::Io(_) => DlStatus::Parse,
        Error::DepthTooLarge { .. } => DlStatus::BudgetExceeded,
        Error::DimensionMismatch { .. }
        | Error::UnsupportedDimension(_)
        | Error::InvalidSimilarity(_)
        | Error::InvalidPolyhedron(_)
        | Error::NoSimilarityExists { .. }
        | Error::DegenerateAngle(_)
        | Error::InvalidSystem(_) => DlStatus::InvalidSystem,
        _ => DlStatus::Computation,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (DlStatus, String)>) -> DlStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            DlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DlStatus, String) {
    (DlStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn system_ref<'a>(handle: *const DlSystem) -> Result<&'a PolyhedralSystem, (DlStatus, String)> {
    handle.as_ref().map(|h| &h.sys).ok_or_else(|| null("system"))
}

fn to_c_string(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn write_json(out: *mut *mut c_char, json: String) {
    *out = to_c_string(json);
}

fn require_dendrite(sys: &PolyhedralSystem) -> Result<(), (DlStatus, String)> {
    let report = validate_system(sys);
    if report.is_dendrite() {
        Ok(())
    } else {
        let failed: Vec<String> = report.failed().iter().map(|c| format!("{c:?}")).collect();
        Err((DlStatus::NotADendrite, format!("system fails {}", failed.join(", "))))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn dl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON system description into a new handle.
#[no_mangle]
pub unsafe extern "C" fn dl_system_from_json(json: *const c_char, out: *mut *mut DlSystem) -> DlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (DlStatus::InvalidUtf8, e.to_string()))?;
        let sys = parse_system_file(text).and_then(|d| d.to_system()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DlSystem { sys }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dl_system_free(system: *mut DlSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of maps, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dl_system_map_count(system: *const DlSystem) -> usize {
    system.as_ref().map_or(0, |h| h.sys.map_count())
}

/// Ambient dimension, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dl_system_dimension(system: *const DlSystem) -> usize {
    system.as_ref().map_or(0, |h| h.sys.dim())
}

/// Checks D1–D4 and connectivity. `is_dendrite` receives 1 or 0; the
/// validation report is written to `report_json` when it is not null.
#[no_mangle]
pub unsafe extern "C" fn dl_validate(
    system: *const DlSystem,
    is_dendrite: *mut c_int,
    report_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let sys = system_ref(system)?;
        if is_dendrite.is_null() {
            return Err(null("is_dendrite"));
        }
        let report = validate_system(sys);
        *is_dendrite = c_int::from(report.is_dendrite());
        if !report_json.is_null() {
            write_json(report_json, serde_json::to_string(&report).expect("report serializes"));
        }
        Ok(())
    })
}

/// Dimension report as JSON. With `depths` null or `depth_count` 0 the default
/// cover depths are used.
#[no_mangle]
pub unsafe extern "C" fn dl_dimensions(
    system: *const DlSystem,
    depths: *const usize,
    depth_count: usize,
    report_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let sys = system_ref(system)?;
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        require_dendrite(sys)?;
        let depths = if depths.is_null() || depth_count == 0 {
            DEFAULT_COVER_DEPTHS.to_vec()
        } else {
            std::slice::from_raw_parts(depths, depth_count).to_vec()
        };
        let report = dimension_report(sys, &depths).map_err(lib_err)?;
        write_json(report_json, serde_json::to_string(&report).expect("report serializes"));
        Ok(())
    })
}

/// Order report for the point with `coord_count` coordinates at `coords`.
/// `stabilization_depth` 0 selects the default.
#[no_mangle]
pub unsafe extern "C" fn dl_point_order(
    system: *const DlSystem,
    coords: *const f64,
    coord_count: usize,
    stabilization_depth: usize,
    report_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let sys = system_ref(system)?;
        if coords.is_null() {
            return Err(null("coords"));
        }
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        require_dendrite(sys)?;
        let x = Point::new(std::slice::from_raw_parts(coords, coord_count).to_vec()).map_err(lib_err)?;
        let n_stab = if stabilization_depth == 0 {
            DEFAULT_STABILIZATION_DEPTH
        } else {
            stabilization_depth
        };
        let report = point_order(sys, &x, n_stab).map_err(lib_err)?;
        write_json(report_json, serde_json::to_string(&report).expect("report serializes"));
        Ok(())
    })
}

/// Solves Σ rᵢ^s = 1 for the similarity dimension s.
#[no_mangle]
pub unsafe extern "C" fn dl_moran_dimension(ratios: *const f64, count: usize, out: *mut f64) -> DlStatus {
    guard(|| {
        if ratios.is_null() {
            return Err(null("ratios"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = moran_dimension(std::slice::from_raw_parts(ratios, count)).map_err(lib_err)?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
