use std::ffi::{CStr, CString};
use std::ptr;

use qscdc_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { qscdc_string_free(p) };
    s
}

fn last_error() -> String {
    take_string(qscdc_last_error_message())
}

fn config(json: &str) -> *mut QscdcConfig {
    let text = CString::new(json).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { qscdc_config_from_json(text.as_ptr(), &mut cfg) }, QscdcStatus::Ok);
    cfg
}

const GOOD: &str = r#"{"scheme":"B","n_pairs":40,"label_pool":["phi+","phi-","psi+","psi-"],
    "test_fraction":0.2,"secret_message":"1011001110","seed":9}"#;

#[test]
fn session_round_trip() {
    let cfg = config(GOOD);
    unsafe {
        let mut n = usize::MAX;
        assert_eq!(qscdc_config_validate(cfg, &mut n), QscdcStatus::Ok);
        assert_eq!(n, 0);

        let mut report = ptr::null_mut();
        assert_eq!(qscdc_session_run(cfg, false, &mut report), QscdcStatus::Ok);
        let mut msg = ptr::null_mut();
        assert_eq!(qscdc_report_recovered_message(report, &mut msg), QscdcStatus::Ok);
        assert_eq!(take_string(msg), "1011001110");
        let (mut acc, mut detected, mut mism) = (0.0, true, usize::MAX);
        assert_eq!(qscdc_report_recovery_accuracy(report, &mut acc), QscdcStatus::Ok);
        assert_eq!(qscdc_report_detected(report, &mut detected), QscdcStatus::Ok);
        assert_eq!(qscdc_report_mismatches(report, &mut mism), QscdcStatus::Ok);
        assert_eq!((acc, detected, mism), (1.0, false, 0));

        let mut json = ptr::null_mut();
        assert_eq!(qscdc_report_to_json(report, &mut json), QscdcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["recovered_message"], "1011001110");

        qscdc_report_free(report);
        qscdc_config_free(cfg);
    }
}

#[test]
fn bypass_pool_needs_opt_in() {
    let cfg = config(r#"{"scheme":"B","n_pairs":8,"label_pool":["phi-","psi+"],"secret_message":"10","seed":1}"#);
    unsafe {
        let mut n = 0;
        assert_eq!(qscdc_config_validate(cfg, &mut n), QscdcStatus::ConfigViolation);
        assert_eq!(n, 1);
        assert_eq!(last_error(), "control bypass: Y-basis correlated pool");

        let mut report = ptr::null_mut();
        assert_eq!(qscdc_session_run(cfg, false, &mut report), QscdcStatus::ConfigViolation);
        assert!(report.is_null());
        assert_eq!(qscdc_session_run(cfg, true, &mut report), QscdcStatus::Ok);
        qscdc_report_free(report);
        qscdc_config_free(cfg);
    }
}

#[test]
fn withheld_reveals_leave_no_message() {
    let cfg = config(&GOOD.replace("\"seed\":9", "\"seed\":9,\"charlie_cooperates\":false"));
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(qscdc_session_run(cfg, false, &mut report), QscdcStatus::Ok);
        let mut msg = ptr::null_mut();
        assert_eq!(qscdc_report_recovered_message(report, &mut msg), QscdcStatus::NotAvailable);
        assert!(msg.is_null());
        qscdc_report_free(report);
        qscdc_config_free(cfg);
    }
}

#[test]
fn bad_json_is_invalid_argument() {
    let text = CString::new(r#"{"scheme":"B","bogus":1}"#).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { qscdc_config_from_json(text.as_ptr(), &mut cfg) }, QscdcStatus::InvalidArgument);
    assert!(cfg.is_null());
    assert!(last_error().starts_with("config parse"));
}

#[test]
fn detection_probabilities() {
    let cases = [
        ("none", "phi+", 0.0),
        ("ghz-coupling", "psi-", 0.25),
        ("intercept-resend:Z:bob", "phi-", 0.25),
        ("intercept-resend:Y:alice", "psi+", 0.5),
        ("ancilla-entangle", "phi+", 0.25),
    ];
    for (attack, label, want) in cases {
        let (a, l) = (CString::new(attack).unwrap(), CString::new(label).unwrap());
        let mut p = -1.0;
        assert_eq!(unsafe { qscdc_detection_probability(a.as_ptr(), l.as_ptr(), &mut p) }, QscdcStatus::Ok);
        assert!((p - want).abs() < 1e-12, "{attack} {label}: {p}");
    }
    let mut p = 0.0;
    let status = unsafe { qscdc_detection_probability(c"none".as_ptr(), c"chi+".as_ptr(), &mut p) };
    assert_eq!(status, QscdcStatus::InvalidArgument);
}

#[test]
fn paper_check_and_version() {
    let mut failed = usize::MAX;
    assert_eq!(unsafe { qscdc_paper_check(&mut failed) }, QscdcStatus::Ok);
    assert_eq!(failed, 0);
    let v = unsafe { CStr::from_ptr(qscdc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qscdc.h")).unwrap();
    for sym in [
        "typedef struct QscdcConfig QscdcConfig;",
        "typedef struct QscdcReport QscdcReport;",
        "QSCDC_STATUS_OK = 0",
        "QSCDC_STATUS_INTERNAL = 6",
        "qscdc_config_from_json(",
        "qscdc_config_validate(",
        "qscdc_config_free(",
        "qscdc_session_run(",
        "qscdc_report_to_json(",
        "qscdc_report_recovered_message(",
        "qscdc_report_recovery_accuracy(",
        "qscdc_report_detected(",
        "qscdc_report_mismatches(",
        "qscdc_report_free(",
        "qscdc_detection_probability(",
        "qscdc_paper_check(",
        "qscdc_last_error_message(",
        "qscdc_string_free(",
        "qscdc_version(",
    ] {
        assert!(header.contains(sym), "header missing {sym}");
    }
}
