//! C ABI over `troplaur`. Series, polygons and reports live behind opaque
//! handles; richer data crosses the boundary as JSON strings.
//!
//! Every call returns a [`TlStatus`]. On failure the message is available
//! from [`tl_last_error`] on the same thread. Strings returned through out
//! pointers are owned by the caller and released with [`tl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use troplaur::cli::{analyse, disk_query, localization_report, parse_updates, validate_spec_report, Analysis, RunOptions, SeriesSpec};
use troplaur::localization::{key_roots, LocalizationReport, Mode, NormChoice};
use troplaur::polygon::Multiplicity;
use troplaur::quadrature::advise_nodes;
use troplaur::series::IndexRange;
use troplaur::update::Combine;
use troplaur::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed spec, report or updates JSON.
    InvalidInput = 3,
    /// Arguments outside an operation's domain.
    Domain = 4,
    /// A numerical procedure did not converge or could not decide.
    Numerical = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlMode {
    Wide = 0,
    Sharp = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlNorm {
    /// The spec's norm, or the 2-norm.
    Default = 0,
    One = 1,
    Two = 2,
    Inf = 3,
    Fro = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlCombine {
    Replace = 0,
    Max = 1,
}

/// One tropical root. `multiplicity` is 0 when `infinite` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlRoot {
    pub log_alpha: f64,
    pub multiplicity: u64,
    pub infinite: bool,
}

/// A parsed series spec.
pub struct TlSeries {
    spec: SeriesSpec,
}

/// Polygon, roots and limits of a scalar series.
pub struct TlPolygon {
    analysis: Analysis,
}

pub struct TlReport {
    report: LocalizationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::Spec(_) | Error::Json(_) | Error::UnknownGenerator(_) | Error::MatrixShape(_) | Error::Csv(_) | Error::Io(_) => {
            TlStatus::InvalidInput
        }
        Error::WindingNonConvergence { .. } | Error::RootCountMismatch { .. } | Error::Undecidable(_) => TlStatus::Numerical,
        _ => TlStatus::Domain,
    }
}

/// Runs `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (TlStatus, String)>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TlStatus, String) {
    (TlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, (TlStatus, String)> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), (TlStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior nul").into_raw()
}

fn options(
    window: Option<IndexRange>,
    updates: Option<&str>,
    combine: TlCombine,
    mode: TlMode,
    norm: TlNorm,
) -> Result<RunOptions, (TlStatus, String)> {
    Ok(RunOptions {
        window,
        updates: updates.map(parse_updates).transpose().map_err(lib_err)?.unwrap_or_default(),
        combine: match combine {
            TlCombine::Replace => Combine::Replace,
            TlCombine::Max => Combine::Max,
        },
        mode: match mode {
            TlMode::Wide => Mode::Wide,
            TlMode::Sharp => Mode::Sharp,
        },
        norm: match norm {
            TlNorm::Default => None,
            TlNorm::One => Some(NormChoice::One),
            TlNorm::Two => Some(NormChoice::Two),
            TlNorm::Inf => Some(NormChoice::Inf),
            TlNorm::Fro => Some(NormChoice::Fro),
        },
        ..RunOptions::default()
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a series spec document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_series_from_json(json: *const c_char, out: *mut *mut TlSeries) -> TlStatus {
    guard(|| {
        let spec = SeriesSpec::parse(text(json, "json")?).map_err(lib_err)?;
        spec.build().map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(TlSeries { spec })), "out")
    })
}

/// # Safety
/// `s` must come from [`tl_series_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tl_series_free(s: *mut TlSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Certified polygon over `[lo, hi]`, or the spec's default window when
/// `use_window` is false. `updates_json` may be null.
///
/// # Safety
/// `series` must be a live handle, `updates_json` null or a nul-terminated
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_compute(
    series: *const TlSeries,
    use_window: bool,
    lo: i64,
    hi: i64,
    updates_json: *const c_char,
    combine: TlCombine,
    out: *mut *mut TlPolygon,
) -> TlStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let window = if use_window { Some(IndexRange::new(lo, hi).map_err(lib_err)?) } else { None };
        let opts = options(window, optional_text(updates_json, "updates_json")?, combine, TlMode::Wide, TlNorm::Default)?;
        let analysis = analyse(&s.spec, &opts).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(TlPolygon { analysis })), "out")
    })
}

/// # Safety
/// `p` must come from [`tl_polygon_compute`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_free(p: *mut TlPolygon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_vertex_count(p: *const TlPolygon, out: *mut usize) -> TlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polygon"))?;
        put(out, p.analysis.polygon.vertices.len(), "out")
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_root_count(p: *const TlPolygon, out: *mut usize) -> TlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polygon"))?;
        put(out, p.analysis.roots.len(), "out")
    })
}

/// Root `index` in increasing order.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_root(p: *const TlPolygon, index: usize, out: *mut TlRoot) -> TlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polygon"))?;
        let r = p
            .analysis
            .roots
            .as_slice()
            .get(index)
            .ok_or_else(|| (TlStatus::OutOfRange, format!("root {index} of {}", p.analysis.roots.len())))?;
        let (multiplicity, infinite) = match r.multiplicity {
            Multiplicity::Finite(m) => (m, false),
            Multiplicity::Infinite => (0, true),
        };
        put(out, TlRoot { log_alpha: r.log_value, multiplicity, infinite }, "out")
    })
}

/// Polygon, roots, limits and update outcomes as JSON.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_polygon_to_json(p: *const TlPolygon, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polygon"))?;
        let s = serde_json::to_string(&p.analysis).map_err(|e| lib_err(e.into()))?;
        put(out, owned_string(s), "out")
    })
}

/// Localization report for a series. `updates_json` may be null.
///
/// # Safety
/// `series` must be a live handle, `updates_json` null or a nul-terminated
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_report_compute(
    series: *const TlSeries,
    mode: TlMode,
    norm: TlNorm,
    updates_json: *const c_char,
    out: *mut *mut TlReport,
) -> TlStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let opts = options(None, optional_text(updates_json, "updates_json")?, TlCombine::Replace, mode, norm)?;
        let report = localization_report(&s.spec, &opts).map_err(lib_err)?;
        put(out, Box::into_raw(Box::new(TlReport { report })), "out")
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_report_from_json(json: *const c_char, out: *mut *mut TlReport) -> TlStatus {
    guard(|| {
        let report: LocalizationReport = serde_json::from_str(text(json, "json")?).map_err(|e| lib_err(e.into()))?;
        put(out, Box::into_raw(Box::new(TlReport { report })), "out")
    })
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_report_to_json(r: *const TlReport, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let s = serde_json::to_string(&r.report).map_err(|e| lib_err(e.into()))?;
        put(out, owned_string(s), "out")
    })
}

/// Number of applicable items in the report.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_report_applicable_count(r: *const TlReport, out: *mut usize) -> TlStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        put(out, r.report.applicable().count(), "out")
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tl_report_free(r: *mut TlReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Quadrature nodes for a contour at the `disk`-th inclusion disk (from 1).
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_advise_nodes(r: *const TlReport, epsilon: f64, disk: usize, out: *mut u64) -> TlStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let q = disk_query(&r.report, disk, epsilon).map_err(lib_err)?;
        put(out, advise_nodes(&q).map_err(lib_err)?, "out")
    })
}

/// Counts report items the winding oracle contradicts.
///
/// # Safety
/// Both handles must be live and `mismatches` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_validate(series: *const TlSeries, r: *const TlReport, mismatches: *mut usize) -> TlStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let summary = validate_spec_report(&s.spec, &r.report).map_err(lib_err)?;
        put(mismatches, summary.mismatches.len(), "mismatches")
    })
}

/// Roots `f <= g` of the localization quadratic.
///
/// # Safety
/// `f` and `g` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_key_roots(delta: f64, c: f64, f: *mut f64, g: *mut f64) -> TlStatus {
    guard(|| {
        let (a, b) = key_roots(delta, c).map_err(lib_err)?;
        put(f, a, "f")?;
        put(g, b, "g")
    })
}
