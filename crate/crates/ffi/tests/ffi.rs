use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hornsolve_ffi::*;

const WORKED: &str = "p(X) :- X >= 10.\n\
                      q(V, W) :- p(U), W = U + V.\n\
                      Z >= Y :- q(Y, Z), Y =< 0.\n";

fn last_error() -> String {
    unsafe { CStr::from_ptr(hs_last_error()) }.to_string_lossy().into_owned()
}

fn parse(text: &str, fmt: HsFormat) -> Result<*mut HsSystem, (HsStatus, String)> {
    let src = CString::new(text).unwrap();
    let mut sys = ptr::null_mut();
    let status = unsafe { hs_system_parse(src.as_ptr(), fmt, &mut sys) };
    if status == HsStatus::Ok {
        Ok(sys)
    } else {
        assert!(sys.is_null());
        Err((status, last_error()))
    }
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { hs_string_free(s) };
    out
}

#[test]
fn solve_round_trip() {
    let sys = parse(WORKED, HsFormat::Native).unwrap();
    unsafe {
        assert_eq!(hs_system_predicate_count(sys), 2);
        assert_eq!(hs_system_clause_count(sys), 3);
        let mut v = ptr::null_mut();
        assert_eq!(hs_solve(sys, ptr::null(), &mut v), HsStatus::Ok);
        assert_eq!(hs_verdict_kind(v), HsVerdictKind::Sat);
        let mut text = ptr::null_mut();
        assert_eq!(hs_verdict_render(v, HsFormat::Native, &mut text), HsStatus::Ok);
        let sol = take_string(text);
        assert!(sol.contains("p(X1) = X1 >= 10."), "{}", sol);

        let c = CString::new(sol).unwrap();
        let mut ok = false;
        assert_eq!(hs_check(sys, c.as_ptr(), HsFormat::Native, &mut ok), HsStatus::Ok);
        assert!(ok);
        let weak = CString::new("p(X1) = true.\nq(X1, X2) = true.\n").unwrap();
        assert_eq!(hs_check(sys, weak.as_ptr(), HsFormat::Native, &mut ok), HsStatus::Ok);
        assert!(!ok);

        hs_verdict_free(v);
        hs_system_free(sys);
    }
}

#[test]
fn unsat_renders_counterexample() {
    let sys = parse("p(X) :- X >= 1.\nX >= 2 :- p(X).\n", HsFormat::Native).unwrap();
    unsafe {
        let mut opts = hs_options_default();
        opts.timeout_ms = 5_000;
        let mut v = ptr::null_mut();
        assert_eq!(hs_solve(sys, &opts, &mut v), HsStatus::Ok);
        assert_eq!(hs_verdict_kind(v), HsVerdictKind::Unsat);
        let mut text = ptr::null_mut();
        assert_eq!(hs_verdict_render(v, HsFormat::Smtlib2, &mut text), HsStatus::Ok);
        assert!(take_string(text).starts_with("(counterexample"));
        hs_verdict_free(v);
        hs_system_free(sys);
    }
}

#[test]
fn error_codes() {
    let (status, msg) = parse("p(X) :- X <= 1.", HsFormat::Native).unwrap_err();
    assert_eq!(status, HsStatus::Parse);
    assert!(msg.contains("=<"), "{}", msg);

    let (status, _) = parse("(assert (forall ((x Real)) (p x)))", HsFormat::Smtlib2).unwrap_err();
    assert_eq!(status, HsStatus::Parse);

    let (status, _) = parse("p(X) :- p(Y), X = Y + 1.", HsFormat::Native)
        .and_then(|s| unsafe {
            let mut v = ptr::null_mut();
            let st = hs_solve(s, ptr::null(), &mut v);
            hs_system_free(s);
            if st == HsStatus::Ok {
                hs_verdict_free(v);
                Ok(s)
            } else {
                Err((st, last_error()))
            }
        })
        .unwrap_err();
    assert_eq!(status, HsStatus::Input);

    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(hs_system_parse(ptr::null(), HsFormat::Native, &mut sys), HsStatus::NullArgument);
        let src = CString::new("").unwrap();
        assert_eq!(hs_system_parse(src.as_ptr(), HsFormat::Native, ptr::null_mut()), HsStatus::NullArgument);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(
            hs_system_parse(bad.as_ptr().cast(), HsFormat::Native, &mut sys),
            HsStatus::InvalidUtf8
        );
        assert_eq!(hs_verdict_kind(ptr::null()), HsVerdictKind::Unknown);
        hs_system_free(ptr::null_mut());
        hs_verdict_free(ptr::null_mut());
        hs_string_free(ptr::null_mut());
    }
}

#[test]
fn resource_limit() {
    // two head clauses per predicate along a chain of 12: 4096 derivations
    let mut text = String::new();
    text += "p0(X) :- X >= 0.\np0(X) :- X =< 0.\n";
    for i in 1..=12 {
        text += &format!("p{i}(X) :- p{}(Y), X = Y + 1.\np{i}(X) :- p{}(Y), X = Y - 1.\n", i - 1, i - 1);
    }
    text += "X >= -100 :- p12(X).\n";
    let sys = parse(&text, HsFormat::Native).unwrap();
    unsafe {
        let mut opts = hs_options_default();
        opts.max_derivations = 100;
        let mut v = ptr::null_mut();
        assert_eq!(hs_solve(sys, &opts, &mut v), HsStatus::ResourceLimit);
        assert!(v.is_null());
        assert!(last_error().contains("limit"));
        hs_system_free(sys);
    }
}

#[test]
fn success_clears_last_error() {
    let _ = parse("p(", HsFormat::Native).unwrap_err();
    assert!(!last_error().is_empty());
    let sys = parse("p(X) :- X >= 0.", HsFormat::Native).unwrap();
    assert!(last_error().is_empty());
    unsafe { hs_system_free(sys) };
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hornsolve.h")
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "hs_last_error",
        "hs_options_default",
        "hs_system_parse",
        "hs_system_free",
        "hs_system_predicate_count",
        "hs_system_clause_count",
        "hs_system_render",
        "hs_solve",
        "hs_verdict_kind",
        "hs_verdict_render",
        "hs_verdict_free",
        "hs_check",
        "hs_string_free",
    ] {
        assert!(h.contains(&format!("{}(", f)), "{} missing from header", f);
    }
    assert!(h.contains("typedef struct HsSystem HsSystem;"));
    assert!(h.contains("HS_STATUS_RESOURCE_LIMIT = 5"));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "hornsolve.h"

int main(void) {
    HsSystem *sys = NULL;
    if (hs_system_parse("p(X) :- X >= 1.\nX >= 2 :- p(X).\n", HS_FORMAT_NATIVE, &sys) != HS_STATUS_OK)
        return 10;
    HsVerdict *v = NULL;
    HsOptions opts = hs_options_default();
    if (hs_solve(sys, &opts, &v) != HS_STATUS_OK) return 11;
    if (hs_verdict_kind(v) != HS_VERDICT_KIND_UNSAT) return 12;
    char *text = NULL;
    if (hs_verdict_render(v, HS_FORMAT_NATIVE, &text) != HS_STATUS_OK) return 13;
    printf("%s", text);
    hs_string_free(text);
    hs_verdict_free(v);
    hs_system_free(sys);
    if (hs_system_parse("p(", HS_FORMAT_NATIVE, &sys) != HS_STATUS_PARSE) return 14;
    if (strlen(hs_last_error()) == 0) return 15;
    return 0;
}
"#;

/// Compiles and runs a C client against the static library, when a C
/// compiler and the library are available.
#[test]
fn c_client() {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    let lib = [deps.join("libhornsolve_ffi.a"), deps.parent().unwrap().join("libhornsolve_ffi.a")]
        .into_iter()
        .find(|p| p.exists());
    let (Some(lib), Ok(_)) = (lib, Command::new("cc").arg("--version").output()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("client");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("derivation: 1(0)"), "{}", stdout);
}
