//! C ABI over `qscdc`. Every fallible call returns a [`QscdcStatus`] and writes
//! results through out-pointers; on failure `qscdc_last_error_message` holds
//! the reason for the calling thread.
//!
//! Strings returned to the caller are owned by the caller and must be released
//! with `qscdc_string_free`. Handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qscdc::adversary::AttackModel;
use qscdc::channel_security::detection_probability_exact;
use qscdc::harness::paper_check;
use qscdc::protocol::{run_session_with, validate_config, SessionConfig, SessionError, SessionOptions, SessionReport};
use qscdc::statevec::BellLabel;

/// Opaque session configuration.
pub struct QscdcConfig(SessionConfig);

/// Opaque session report.
pub struct QscdcReport(SessionReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QscdcStatus {
    Ok = 0,
    ConfigViolation = 1,
    Io = 2,
    InvalidArgument = 3,
    NullPointer = 4,
    /// The requested value does not exist, e.g. no recovered message.
    NotAvailable = 5,
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: QscdcStatus, msg: impl Into<String>) -> QscdcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> QscdcStatus) -> QscdcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(QscdcStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, QscdcStatus> {
    if p.is_null() {
        return Err(fail(QscdcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(QscdcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(QscdcStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

macro_rules! out {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(QscdcStatus::NullPointer, "output pointer is null"),
        }
    };
}

/// Parse a session config from a NUL-terminated JSON string.
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_config_from_json(json: *const c_char, out: *mut *mut QscdcConfig) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let text = match read_str(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<SessionConfig>(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(QscdcConfig(cfg)));
                QscdcStatus::Ok
            }
            Err(e) => fail(QscdcStatus::InvalidArgument, format!("config parse: {e}")),
        }
    })
}

/// Check the config. Writes the number of violations to `n_violations` (may be
/// null) and returns `ConfigViolation` if there is at least one.
///
/// # Safety
/// `config` must come from `qscdc_config_from_json`.
#[no_mangle]
pub unsafe extern "C" fn qscdc_config_validate(config: *const QscdcConfig, n_violations: *mut usize) -> QscdcStatus {
    guard(|| {
        let cfg = deref!(config, "config");
        let violations = validate_config(&cfg.0);
        if let Some(n) = n_violations.as_mut() {
            *n = violations.len();
        }
        if violations.is_empty() {
            QscdcStatus::Ok
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            fail(QscdcStatus::ConfigViolation, msg.join("; "))
        }
    })
}

/// # Safety
/// `config` must come from `qscdc_config_from_json` or be null.
#[no_mangle]
pub unsafe extern "C" fn qscdc_config_free(config: *mut QscdcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run one session. With `allow_bypass` set, control-bypass pools run anyway.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_session_run(
    config: *const QscdcConfig,
    allow_bypass: bool,
    out: *mut *mut QscdcReport,
) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let cfg = deref!(config, "config");
        let options = SessionOptions { allow_violations: allow_bypass, ..Default::default() };
        match run_session_with(&cfg.0, &options) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(QscdcReport(report)));
                QscdcStatus::Ok
            }
            Err(e @ SessionError::Config(_)) => fail(QscdcStatus::ConfigViolation, e.to_string()),
            Err(e) => fail(QscdcStatus::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_to_json(report: *const QscdcReport, out: *mut *mut c_char) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        let r = deref!(report, "report");
        *out = into_c_string(r.0.to_json());
        QscdcStatus::Ok
    })
}

/// Writes Bob's decoded message, or returns `NotAvailable` when the session
/// aborted or Charlie withheld the reveals.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_recovered_message(
    report: *const QscdcReport,
    out: *mut *mut c_char,
) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let r = deref!(report, "report");
        match &r.0.recovered_message {
            Some(m) => {
                *out = into_c_string(m.clone());
                QscdcStatus::Ok
            }
            None => fail(QscdcStatus::NotAvailable, "no recovered message"),
        }
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_recovery_accuracy(report: *const QscdcReport, out: *mut f64) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = deref!(report, "report").0.recovery_accuracy;
        QscdcStatus::Ok
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_detected(report: *const QscdcReport, out: *mut bool) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = deref!(report, "report").0.detection_flag;
        QscdcStatus::Ok
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_mismatches(report: *const QscdcReport, out: *mut usize) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        *out = deref!(report, "report").0.verdict.mismatches;
        QscdcStatus::Ok
    })
}

/// # Safety
/// `report` must come from `qscdc_session_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn qscdc_report_free(report: *mut QscdcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Exact per-pair detection probability for an attack tag such as
/// `"ghz-coupling"` or `"intercept-resend:X:alice"` on a label such as `"phi-"`.
///
/// # Safety
/// Both strings must be valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qscdc_detection_probability(
    attack: *const c_char,
    label: *const c_char,
    out: *mut f64,
) -> QscdcStatus {
    guard(|| {
        let out = out!(out);
        let (attack, label) = match (read_str(attack, "attack"), read_str(label, "label")) {
            (Ok(a), Ok(l)) => (a, l),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let model = match AttackModel::from_tag(attack) {
            Ok(m) => m,
            Err(e) => return fail(QscdcStatus::InvalidArgument, e.to_string()),
        };
        let label: BellLabel = match label.parse() {
            Ok(l) => l,
            Err(e) => return fail(QscdcStatus::InvalidArgument, e.to_string()),
        };
        match detection_probability_exact(&model, label) {
            Ok(p) => {
                *out = p;
                QscdcStatus::Ok
            }
            Err(e) => fail(QscdcStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Replay the built-in worked examples. Writes the number of failed checks to
/// `n_failed` (may be null); returns `Internal` if any failed.
///
/// # Safety
/// `n_failed` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn qscdc_paper_check(n_failed: *mut usize) -> QscdcStatus {
    guard(|| {
        let failed: Vec<String> =
            paper_check().into_iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        if let Some(n) = n_failed.as_mut() {
            *n = failed.len();
        }
        if failed.is_empty() {
            QscdcStatus::Ok
        } else {
            fail(QscdcStatus::Internal, failed.join("; "))
        }
    })
}

/// Copy of the calling thread's last error, or null. Free with `qscdc_string_free`.
#[no_mangle]
pub extern "C" fn qscdc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn qscdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static version string; do not free.
#[no_mangle]
pub extern "C" fn qscdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
