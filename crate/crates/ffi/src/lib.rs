//! C ABI for the jumpfinder library.
//!
//! Objects cross the boundary as opaque handles created by `jf_*_new` or a
//! producing call and released with the matching `jf_*_free`. Every fallible
//! call returns a [`JfStatus`]; on failure [`jf_last_error_message`] returns a
//! description that stays valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jumpfinder::bandwidth::default_candidates;
use jumpfinder::{
    select_bandwidth, BandwidthSearchConfig, BootstrapResult, DetectorConfig, Error, JumpEstimate,
    Method, ObservedSample,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    EmptyWindow = 3,
    NoValidGridPoint = 4,
    AllCandidatesFailed = 5,
    Panic = 6,
}

/// Detection procedure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JfMethod {
    /// Error-robust double-kernel detector.
    New = 0,
    /// Difference of conventional one-sided kernel estimates.
    Dke = 1,
}

impl From<JfMethod> for Method {
    fn from(m: JfMethod) -> Self {
        match m {
            JfMethod::New => Method::new_default(),
            JfMethod::Dke => Method::dke_default(),
        }
    }
}

/// Observed `(w, y)` pairs.
pub struct JfSample(ObservedSample);

/// Result of a single detection run.
pub struct JfJumpEstimate(JumpEstimate);

/// Result of bootstrap bandwidth selection.
pub struct JfBootstrapResult(BootstrapResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> JfStatus {
    set_error(err.to_string());
    match err {
        Error::EmptyWindow => JfStatus::EmptyWindow,
        Error::NoValidGridPoint => JfStatus::NoValidGridPoint,
        Error::AllCandidatesFailed => JfStatus::AllCandidatesFailed,
        _ => JfStatus::InvalidInput,
    }
}

fn null_pointer(name: &str) -> JfStatus {
    set_error(format!("null pointer passed for `{name}`"));
    JfStatus::NullPointer
}

fn guard(f: impl FnOnce() -> JfStatus) -> JfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            JfStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize) -> &'a [f64] {
    if n == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(p, n)
    }
}

/// Copies `n` pairs into a new sample. The sample is sorted by `w`.
///
/// # Safety
/// `w` and `y` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jf_sample_new(
    w: *const f64,
    y: *const f64,
    n: usize,
    out: *mut *mut JfSample,
) -> JfStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        if n > 0 && w.is_null() {
            return null_pointer("w");
        }
        if n > 0 && y.is_null() {
            return null_pointer("y");
        }
        match ObservedSample::new(slice(w, n).to_vec(), slice(y, n).to_vec()) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(JfSample(s)));
                JfStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `sample` must be null or a handle from [`jf_sample_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jf_sample_free(sample: *mut JfSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_sample_len(sample: *const JfSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Runs the detector at one bandwidth on the default grid over `[min w, max w]`.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jf_detect(
    sample: *const JfSample,
    method: JfMethod,
    bandwidth: f64,
    out: *mut *mut JfJumpEstimate,
) -> JfStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        let Some(sample) = sample.as_ref() else {
            return null_pointer("sample");
        };
        let result = sample
            .0
            .domain()
            .and_then(|d| DetectorConfig::new(bandwidth, d))
            .and_then(|c| Method::from(method).detect(&sample.0, &c));
        match result {
            Ok(e) => {
                *out = Box::into_raw(Box::new(JfJumpEstimate(e)));
                JfStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `estimate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_free(estimate: *mut JfJumpEstimate) {
    if !estimate.is_null() {
        drop(Box::from_raw(estimate));
    }
}

/// Estimated jump location, or NaN for a null handle.
///
/// # Safety
/// `estimate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_location(estimate: *const JfJumpEstimate) -> f64 {
    estimate.as_ref().map_or(f64::NAN, |e| e.0.location)
}

/// Signed jump magnitude (right limit minus left limit), or NaN.
///
/// # Safety
/// `estimate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_magnitude(estimate: *const JfJumpEstimate) -> f64 {
    estimate.as_ref().map_or(f64::NAN, |e| e.0.magnitude)
}

/// Bandwidth used, or NaN.
///
/// # Safety
/// `estimate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_bandwidth(estimate: *const JfJumpEstimate) -> f64 {
    estimate.as_ref().map_or(f64::NAN, |e| e.0.bandwidth)
}

/// Number of evaluated grid points in the difference curve.
///
/// # Safety
/// `estimate` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_curve_len(estimate: *const JfJumpEstimate) -> usize {
    estimate.as_ref().map_or(0, |e| e.0.diff_curve.len())
}

/// Writes grid point `index` of the difference curve and its absolute difference.
///
/// # Safety
/// `estimate` must be a live handle; `x` and `diff` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jf_estimate_curve_point(
    estimate: *const JfJumpEstimate,
    index: usize,
    x: *mut f64,
    diff: *mut f64,
) -> JfStatus {
    guard(|| {
        let Some(estimate) = estimate.as_ref() else {
            return null_pointer("estimate");
        };
        if x.is_null() || diff.is_null() {
            return null_pointer("x/diff");
        }
        match estimate.0.diff_curve.get(index) {
            Some(p) => {
                *x = p.x;
                *diff = p.diff;
                JfStatus::Ok
            }
            None => {
                set_error(format!(
                    "index {index} out of range for a curve of {} points",
                    estimate.0.diff_curve.len()
                ));
                JfStatus::InvalidInput
            }
        }
    })
}

/// Bootstrap bandwidth selection with a percentile interval for the location.
/// With `n_candidates == 0` a default log-spaced candidate set is used.
///
/// # Safety
/// `sample` must be a live handle; `candidates` must point to `n_candidates`
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jf_select_bandwidth(
    sample: *const JfSample,
    method: JfMethod,
    candidates: *const f64,
    n_candidates: usize,
    replicates: usize,
    seed: u64,
    alpha: f64,
    out: *mut *mut JfBootstrapResult,
) -> JfStatus {
    guard(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        *out = ptr::null_mut();
        let Some(sample) = sample.as_ref() else {
            return null_pointer("sample");
        };
        if n_candidates > 0 && candidates.is_null() {
            return null_pointer("candidates");
        }
        let domain = match sample.0.domain() {
            Ok(d) => d,
            Err(e) => return status_of(&e),
        };
        let grid = if n_candidates == 0 {
            match default_candidates(&sample.0, &domain, 15) {
                Ok(g) => g,
                Err(e) => return status_of(&e),
            }
        } else {
            slice(candidates, n_candidates).to_vec()
        };
        let search = BandwidthSearchConfig::new(grid, replicates, seed).with_alpha(alpha);
        match select_bandwidth(&sample.0, &search, &Method::from(method), |h| {
            DetectorConfig::new(h, domain)
        }) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(JfBootstrapResult(r)));
                JfStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_free(result: *mut JfBootstrapResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_bandwidth(result: *const JfBootstrapResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.selected_bandwidth)
}

/// Location estimated on the original sample at the selected bandwidth.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_location(result: *const JfBootstrapResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.estimate.location)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_magnitude(result: *const JfBootstrapResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.estimate.magnitude)
}

/// Writes the percentile interval bounds.
///
/// # Safety
/// `result` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_ci(
    result: *const JfBootstrapResult,
    lower: *mut f64,
    upper: *mut f64,
) -> JfStatus {
    let Some(result) = result.as_ref() else {
        return null_pointer("result");
    };
    if lower.is_null() || upper.is_null() {
        return null_pointer("lower/upper");
    }
    *lower = result.0.ci.0;
    *upper = result.0.ci.1;
    JfStatus::Ok
}

/// Resamples that failed at the selected bandwidth.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jf_bootstrap_dropped(result: *const JfBootstrapResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.dropped_replicates)
}

/// Message for the most recent failure on this thread, or null if none.
#[no_mangle]
pub extern "C" fn jf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
