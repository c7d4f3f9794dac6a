//! C ABI for the solver: opaque problem handles, integer status codes, and
//! exact results returned as decimal rational strings. A handwritten
//! header lives in `include/wmi.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wmi_core::bench::runner::Algo;
use wmi_core::engine::EngineOpts;
use wmi_core::error::WmiError;
use wmi_core::model::parser::parse_problem;
use wmi_core::model::problem::Problem;

pub const WMI_OK: c_int = 0;
pub const WMI_ERR_ARGUMENT: c_int = 1;
pub const WMI_ERR_PARSE: c_int = 2;
pub const WMI_ERR_SOLVE: c_int = 3;
pub const WMI_ERR_PANIC: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

/// The message of the most recent failure on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wmi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

pub struct WmiProblem {
    problem: Problem,
}

/// Parse a problem in the textual dialect. On success writes a heap handle
/// to `out` and returns `WMI_OK`; the caller frees it with
/// `wmi_problem_free`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wmi_problem_parse(
    text: *const c_char,
    out: *mut *mut WmiProblem,
) -> c_int {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return WMI_ERR_ARGUMENT;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("text is not valid UTF-8");
        return WMI_ERR_ARGUMENT;
    };
    match catch_unwind(|| parse_problem(text)) {
        Ok(Ok(problem)) => {
            *out = Box::into_raw(Box::new(WmiProblem { problem }));
            WMI_OK
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            WMI_ERR_PARSE
        }
        Err(_) => {
            set_error("internal panic");
            WMI_ERR_PANIC
        }
    }
}

/// # Safety
/// `p` must be a handle from `wmi_problem_parse` (or null), freed once.
#[no_mangle]
pub unsafe extern "C" fn wmi_problem_free(p: *mut WmiProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Solve with `algo` one of "bf", "pa", "sa". On success writes a
/// NUL-terminated exact rational (e.g. "203/3") to `value_out` — freed by
/// the caller with `wmi_string_free` — and the integral count to
/// `n_integrals_out` (which may be null).
///
/// # Safety
/// `p` must be a live handle, `algo` a valid NUL-terminated string, and
/// `value_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wmi_solve(
    p: *const WmiProblem,
    algo: *const c_char,
    value_out: *mut *mut c_char,
    n_integrals_out: *mut u64,
) -> c_int {
    if p.is_null() || algo.is_null() || value_out.is_null() {
        set_error("null argument");
        return WMI_ERR_ARGUMENT;
    }
    let Ok(name) = CStr::from_ptr(algo).to_str() else {
        set_error("algo is not valid UTF-8");
        return WMI_ERR_ARGUMENT;
    };
    let Some(algo) = Algo::parse(name) else {
        set_error("unknown algorithm (use bf, pa, or sa)");
        return WMI_ERR_ARGUMENT;
    };
    let problem = &(*p).problem;
    let run = catch_unwind(AssertUnwindSafe(|| {
        algo.run(problem, &EngineOpts::default())
    }));
    match run {
        Ok(Ok(r)) => {
            *value_out = CString::new(r.value.to_string()).unwrap().into_raw();
            if !n_integrals_out.is_null() {
                *n_integrals_out = r.n_integrals as u64;
            }
            WMI_OK
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            match e {
                WmiError::Parse { .. } => WMI_ERR_PARSE,
                _ => WMI_ERR_SOLVE,
            }
        }
        Err(_) => {
            set_error("internal panic");
            WMI_ERR_PANIC
        }
    }
}

/// # Safety
/// `s` must come from this library (or be null), freed once.
#[no_mangle]
pub unsafe extern "C" fn wmi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
