//! C interface to the ldstab set-stability analysis.
//!
//! The surface is deliberately small: parse a network document into an
//! opaque handle, query it, run the full analysis to a JSON string, and
//! free what you were given. Every fallible call returns a status code and
//! leaves a human-readable message behind `ldstab_last_error`.
//!
//! Ownership rules: handles from `ldstab_system_parse` are released with
//! `ldstab_system_free`; strings written to an out-parameter are released
//! with `ldstab_string_free`. Nothing else transfers ownership. Handles are
//! immutable after creation, so sharing one across threads for reads is
//! fine; the error message store is per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use num_traits::ToPrimitive;

use ldstab::error::Error;
use ldstab::invariant::lris;
use ldstab::lds::Network;
use ldstab::reach::{self, DotHighlights};
use ldstab::stability;
use ldstab::{parse_network, StateSet};

/// Opaque handle to a parsed network document.
pub struct LdstabSystem {
    net: Network,
}

/// Status of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdstabStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The document was not a valid network.
    ParseError = 3,
    /// An index, distribution, or step count was out of range.
    InvalidArgument = 4,
    /// A brute-force operation exceeded its resource cap.
    CapExceeded = 5,
    /// No target set: the document has none and none was passed.
    NoTarget = 6,
    /// An internal consistency check failed; report this as a bug.
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: LdstabStatus, message: impl Into<Vec<u8>>) -> LdstabStatus {
    let text = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained an interior NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
    status
}

fn fail_from(e: Error) -> LdstabStatus {
    let status = match &e {
        Error::Json(_) | Error::InvalidNetwork(_) => LdstabStatus::ParseError,
        Error::CapExceeded { .. } => LdstabStatus::CapExceeded,
        Error::CriteriaDisagree(_) => LdstabStatus::Internal,
        _ => LdstabStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Message describing the most recent failure on this thread, or null if
/// none has occurred. The pointer stays valid until the next failing call
/// on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn ldstab_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Parse a JSON network document into a fresh handle.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ldstab_system_parse(
    json: *const c_char,
    out: *mut *mut LdstabSystem,
) -> LdstabStatus {
    if json.is_null() || out.is_null() {
        return fail(LdstabStatus::NullArgument, "json and out must be non-null");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(text) => text,
        Err(_) => return fail(LdstabStatus::InvalidUtf8, "document is not valid UTF-8"),
    };
    match parse_network(text) {
        Ok(net) => {
            *out = Box::into_raw(Box::new(LdstabSystem { net }));
            LdstabStatus::Ok
        }
        Err(e) => fail_from(e),
    }
}

/// Release a handle from `ldstab_system_parse`. Passing null is a no-op.
///
/// # Safety
/// `sys` must be null or a pointer this library returned that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn ldstab_system_free(sys: *mut LdstabSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Release a string written to an out-parameter by this library. Passing
/// null is a no-op.
///
/// # Safety
/// `s` must be null or a string pointer this library returned that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn ldstab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of states n.
///
/// # Safety
/// `sys` must be a live handle from `ldstab_system_parse`.
#[no_mangle]
pub unsafe extern "C" fn ldstab_system_state_count(sys: *const LdstabSystem) -> usize {
    if sys.is_null() {
        return 0;
    }
    (*sys).net.lds.state_count()
}

/// Number of subnetworks m.
///
/// # Safety
/// `sys` must be a live handle from `ldstab_system_parse`.
#[no_mangle]
pub unsafe extern "C" fn ldstab_system_subnetwork_count(sys: *const LdstabSystem) -> usize {
    if sys.is_null() {
        return 0;
    }
    (*sys).net.lds.subnetwork_count()
}

/// One step from state `x` (1-based) under subnetwork `j` (1-based).
///
/// # Safety
/// `sys` must be a live handle and `out_state` writable.
#[no_mangle]
pub unsafe extern "C" fn ldstab_system_step(
    sys: *const LdstabSystem,
    x: usize,
    j: usize,
    out_state: *mut usize,
) -> LdstabStatus {
    if sys.is_null() || out_state.is_null() {
        return fail(
            LdstabStatus::NullArgument,
            "sys and out_state must be non-null",
        );
    }
    match (*sys).net.lds.step(x, j) {
        Ok(y) => {
            *out_state = y;
            LdstabStatus::Ok
        }
        Err(e) => fail_from(e),
    }
}

/// The target set in effect: the explicit list if `target` is non-null,
/// otherwise the target bundled in the document.
unsafe fn resolve_target(
    sys: &LdstabSystem,
    target: *const usize,
    target_len: usize,
) -> Result<StateSet, LdstabStatus> {
    if !target.is_null() {
        let indices = std::slice::from_raw_parts(target, target_len);
        return StateSet::new(sys.net.lds.state_count(), indices.iter().copied())
            .map_err(fail_from);
    }
    match &sys.net.target {
        Some(t) => Ok(t.clone()),
        None => Err(fail(
            LdstabStatus::NoTarget,
            "no target set: the document has none and none was passed",
        )),
    }
}

/// Run the full stability analysis and write the JSON report to
/// `out_json` (release it with `ldstab_string_free`). Pass a null `target`
/// to use the target bundled in the document.
///
/// # Safety
/// `sys` must be a live handle; `target` must be null or point to
/// `target_len` readable entries; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldstab_analyze_json(
    sys: *const LdstabSystem,
    target: *const usize,
    target_len: usize,
    out_json: *mut *mut c_char,
) -> LdstabStatus {
    if sys.is_null() || out_json.is_null() {
        return fail(
            LdstabStatus::NullArgument,
            "sys and out_json must be non-null",
        );
    }
    let sys = &*sys;
    let target = match resolve_target(sys, target, target_len) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match stability::analyze(&sys.net.lds, &target) {
        Ok(report) => {
            let json = CString::new(report.to_json()).expect("JSON has no interior NUL");
            *out_json = json.into_raw();
            LdstabStatus::Ok
        }
        Err(e) => fail_from(e),
    }
}

/// Exact k-step reachable-pattern ratio from `x0` into the target set,
/// written as a double. Pass a null `target` to use the document's target.
///
/// # Safety
/// `sys` must be a live handle; `target` must be null or point to
/// `target_len` readable entries; `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldstab_ratio(
    sys: *const LdstabSystem,
    x0: usize,
    k: u32,
    target: *const usize,
    target_len: usize,
    out_ratio: *mut f64,
) -> LdstabStatus {
    if sys.is_null() || out_ratio.is_null() {
        return fail(
            LdstabStatus::NullArgument,
            "sys and out_ratio must be non-null",
        );
    }
    if k == 0 {
        return fail(LdstabStatus::InvalidArgument, "k must be at least 1");
    }
    let sys = &*sys;
    let target = match resolve_target(sys, target, target_len) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match stability::ratio(&sys.net.lds, x0, &target, k as usize) {
        Ok(value) => {
            *out_ratio = value.to_f64().unwrap_or(f64::NAN);
            LdstabStatus::Ok
        }
        Err(e) => fail_from(e),
    }
}

/// Render the state transition graph as DOT and write it to `out_dot`
/// (release it with `ldstab_string_free`). The highlight flags fill the
/// target states, outline the self-reachable states, and double-border the
/// largest robustly invariant subset; target-dependent highlights need a
/// target from either `target` or the document.
///
/// # Safety
/// `sys` must be a live handle; `target` must be null or point to
/// `target_len` readable entries; `out_dot` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ldstab_stg_dot(
    sys: *const LdstabSystem,
    highlight_target: bool,
    highlight_c0: bool,
    highlight_lris: bool,
    target: *const usize,
    target_len: usize,
    out_dot: *mut *mut c_char,
) -> LdstabStatus {
    if sys.is_null() || out_dot.is_null() {
        return fail(
            LdstabStatus::NullArgument,
            "sys and out_dot must be non-null",
        );
    }
    let sys = &*sys;
    let target_set = if highlight_target || highlight_lris {
        match resolve_target(sys, target, target_len) {
            Ok(t) => Some(t),
            Err(status) => return status,
        }
    } else {
        None
    };
    let lris_set = target_set
        .as_ref()
        .filter(|_| highlight_lris)
        .map(|t| lris(&sys.net.lds, t));
    let c0 = highlight_c0.then(|| reach::self_reachable_set(&sys.net.lds));
    let dot = reach::stg_dot(
        &sys.net.lds,
        sys.net.name.as_deref(),
        DotHighlights {
            target: target_set.as_ref().filter(|_| highlight_target),
            self_reachable: c0.as_ref(),
            lris: lris_set.as_ref(),
        },
    );
    let text = CString::new(dot).expect("DOT output has no interior NUL");
    *out_dot = text.into_raw();
    LdstabStatus::Ok
}
