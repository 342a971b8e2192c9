//! C interface to the hornsolve library.
//!
//! Systems and verdicts are opaque handles owned by the caller and released
//! with their `_free` function. Every call returns an [`HsStatus`]; on failure
//! [`hs_last_error`] describes the problem. Strings returned through `out`
//! parameters are released with [`hs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use hornsolve::check::{check_solution, CheckOutcome};
use hornsolve::frontend::{
    parse_solution, parse_system, render_counterexample, render_solution, render_system,
    SourceFormat,
};
use hornsolve::{ClauseSystem, Error, Limits, Options, Verdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    ResourceLimit = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsFormat {
    Native = 0,
    Smtlib2 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsVerdictKind {
    Sat = 0,
    Unsat = 1,
    Unknown = 2,
}

/// Resource limits and checking; start from [`hs_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HsOptions {
    pub max_derivations: usize,
    pub max_fm_constraints: usize,
    /// Milliseconds; 0 disables the limit.
    pub timeout_ms: u64,
    pub check: bool,
}

pub struct HsSystem {
    system: ClauseSystem,
}

pub struct HsVerdict {
    verdict: Verdict,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(e: Error) -> HsStatus {
    let status = match e {
        Error::Syntax { .. } => HsStatus::Parse,
        Error::ResourceLimit(_) => HsStatus::ResourceLimit,
        Error::Internal(_) => HsStatus::Internal,
        _ => HsStatus::Input,
    };
    set_error(e.to_string());
    status
}

/// Runs `f`, turning panics into [`HsStatus::Panic`].
fn guard(f: impl FnOnce() -> HsStatus) -> HsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {}", msg));
            HsStatus::Panic
        }
    }
}

fn format(f: HsFormat) -> SourceFormat {
    match f {
        HsFormat::Native => SourceFormat::Native,
        HsFormat::Smtlib2 => SourceFormat::Smtlib2,
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, HsStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(HsStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        HsStatus::InvalidUtf8
    })
}

unsafe fn give_string(s: String, out: *mut *mut c_char) -> HsStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            HsStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            HsStatus::Internal
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("`", stringify!($p), "` is null"));
            return HsStatus::NullArgument;
        })+
    };
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn hs_options_default() -> HsOptions {
    let l = Limits::default();
    HsOptions {
        max_derivations: l.max_derivations,
        max_fm_constraints: l.max_fm_constraints,
        timeout_ms: l.timeout.map_or(0, |t| t.as_millis() as u64),
        check: true,
    }
}

/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_system_parse(
    source: *const c_char,
    fmt: HsFormat,
    out: *mut *mut HsSystem,
) -> HsStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let src = match text(source) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_system(src, format(fmt)) {
            Ok(system) => {
                *out = Box::into_raw(Box::new(HsSystem { system }));
                HsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `system` must come from [`hs_system_parse`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn hs_system_free(system: *mut HsSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_system_predicate_count(system: *const HsSystem) -> usize {
    system.as_ref().map_or(0, |s| s.system.predicates().len())
}

/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_system_clause_count(system: *const HsSystem) -> usize {
    system.as_ref().map_or(0, |s| s.system.clauses().len())
}

/// # Safety
/// `system` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_system_render(
    system: *const HsSystem,
    fmt: HsFormat,
    out: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        non_null!(system, out);
        give_string(render_system(&(*system).system, format(fmt)), out)
    })
}

/// Solves `system`. `options` may be null for the defaults.
///
/// # Safety
/// `system` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hs_solve(
    system: *const HsSystem,
    options: *const HsOptions,
    out: *mut *mut HsVerdict,
) -> HsStatus {
    guard(|| {
        non_null!(system, out);
        *out = ptr::null_mut();
        let o = options.as_ref().copied().unwrap_or_else(|| hs_options_default());
        let opts = Options {
            limits: Limits {
                max_derivations: o.max_derivations,
                max_fm_constraints: o.max_fm_constraints,
                timeout: (o.timeout_ms > 0).then(|| Duration::from_millis(o.timeout_ms)),
            },
            check: o.check,
        };
        match hornsolve::solve(&(*system).system, &opts) {
            Ok(verdict) => {
                *out = Box::into_raw(Box::new(HsVerdict { verdict }));
                HsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_verdict_kind(verdict: *const HsVerdict) -> HsVerdictKind {
    match verdict.as_ref().map(|v| &v.verdict) {
        Some(Verdict::Solvable(_)) => HsVerdictKind::Sat,
        Some(Verdict::Unsolvable(_)) => HsVerdictKind::Unsat,
        _ => HsVerdictKind::Unknown,
    }
}

/// The solution (sat), counterexample (unsat) or reason (unknown) as text.
///
/// # Safety
/// `verdict` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_verdict_render(
    verdict: *const HsVerdict,
    fmt: HsFormat,
    out: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        non_null!(verdict, out);
        let text = match &(*verdict).verdict {
            Verdict::Solvable(sol) => render_solution(sol, format(fmt)),
            Verdict::Unsolvable(cex) => render_counterexample(cex, format(fmt)),
            Verdict::Unknown(reason) => reason.clone(),
        };
        give_string(text, out)
    })
}

/// # Safety
/// `verdict` must come from [`hs_solve`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn hs_verdict_free(verdict: *mut HsVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// Checks a solution given as text. `*verified` is set on success.
///
/// # Safety
/// `system` must be a live handle, `solution` NUL-terminated, `verified` valid.
#[no_mangle]
pub unsafe extern "C" fn hs_check(
    system: *const HsSystem,
    solution: *const c_char,
    fmt: HsFormat,
    verified: *mut bool,
) -> HsStatus {
    guard(|| {
        non_null!(system, verified);
        let src = match text(solution) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let result = parse_solution(src, format(fmt))
            .and_then(|sol| check_solution(&(*system).system, &sol));
        match result {
            Ok(outcome) => {
                *verified = outcome == CheckOutcome::Verified;
                HsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
