use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use norden_ffi::*;

const FLAT: &str = include_str!("../../core/examples_manifests/flat_kahler_4.json");

fn last_error() -> String {
    let p = norden_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load_json(text: &str) -> (NordenStatus, *mut NordenManifold) {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { norden_manifold_from_json(c.as_ptr(), &mut m) };
    (s, m)
}

#[test]
fn flat_manifest_verifies_without_failures() {
    let (s, m) = load_json(FLAT);
    assert_eq!(s, NordenStatus::Ok);
    assert_eq!(unsafe { norden_manifold_dim(m) }, 4);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { norden_verify(m, 1e-9, &mut r) }, NordenStatus::Ok);
    let class = unsafe { CStr::from_ptr(norden_report_class(r)) };
    assert_eq!(class.to_str().unwrap(), "KAHLER_W0");
    let (mut p, mut f, mut na) = (0, 0, 0);
    assert_eq!(unsafe { norden_report_counts(r, &mut p, &mut f, &mut na) }, NordenStatus::Ok);
    assert_eq!((f, na), (0, 0));
    assert!(p > 0);

    let id = CString::new("EQ_1_7").unwrap();
    let mut st = NordenCheckStatus::Fail;
    let mut res = f64::NAN;
    assert_eq!(unsafe { norden_report_check(r, id.as_ptr(), &mut st, &mut res) }, NordenStatus::Ok);
    assert_eq!(st, NordenCheckStatus::Pass);
    assert_eq!(res, 0.0);

    let mut text: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { norden_report_render(r, true, &mut text) }, NordenStatus::Ok);
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(json.contains("\"manifold_id\": \"flat_kahler_4\""));
    unsafe {
        norden_string_free(text);
        norden_report_free(r);
        norden_manifold_free(m);
    }
}

#[test]
fn manifest_round_trips_through_the_handle() {
    let (_, m) = load_json(FLAT);
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { norden_manifold_to_json(m, &mut out) }, NordenStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), FLAT);
    unsafe {
        norden_string_free(out);
        norden_manifold_free(m);
    }
}

#[test]
fn arrays_constructor_matches_manifest() {
    let g = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
    let j = [0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let c = [0.0; 64];
    let id = CString::new("arrays").unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe {
        norden_manifold_from_arrays(id.as_ptr(), 4, c.as_ptr(), g.as_ptr(), j.as_ptr(), &mut m)
    };
    assert_eq!(s, NordenStatus::Ok);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { norden_verify(m, 0.0, &mut r) }, NordenStatus::Ok);
    let mut f = 1;
    unsafe { norden_report_counts(r, ptr::null_mut(), &mut f, ptr::null_mut()) };
    assert_eq!(f, 0);
    unsafe {
        norden_report_free(r);
        norden_manifold_free(m);
    }
}

#[test]
fn error_codes_are_distinct() {
    let missing = CString::new("/nonexistent/flat.json").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { norden_manifold_load(missing.as_ptr(), &mut m) }, NordenStatus::Io);
    assert!(m.is_null());
    assert!(last_error().contains("nonexistent"));

    assert_eq!(load_json("{\"id\":").0, NordenStatus::Parse);
    let ragged = FLAT.replacen("[0.0, 0.0, 0.0, 0.0]", "[0.0, 0.0]", 1);
    assert_eq!(load_json(&ragged).0, NordenStatus::Shape);

    assert_eq!(
        unsafe { norden_manifold_load(ptr::null(), &mut m) },
        NordenStatus::NullPointer
    );
    let path = CString::new("x").unwrap();
    assert_eq!(
        unsafe { norden_manifold_load(path.as_ptr(), ptr::null_mut()) },
        NordenStatus::NullPointer
    );
}

#[test]
fn non_norden_metric_is_rejected_at_verify() {
    let text = FLAT.replace("-1.0000000000000000e0, 0.0],\n    [0.0, 0.0, 0.0, -1.0000000000000000e0]", "1.0000000000000000e0, 0.0],\n    [0.0, 0.0, 0.0, 1.0000000000000000e0]");
    assert_ne!(text, FLAT);
    let (s, m) = load_json(&text);
    assert_eq!(s, NordenStatus::Ok);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { norden_verify(m, 1e-9, &mut r) }, NordenStatus::InvalidManifold);
    assert!(r.is_null());
    assert!(last_error().contains("Norden"));
    unsafe { norden_manifold_free(m) };
}

#[test]
fn unknown_check_id_is_an_argument_error() {
    let (_, m) = load_json(FLAT);
    let mut r = ptr::null_mut();
    unsafe { norden_verify(m, 1e-9, &mut r) };
    let id = CString::new("NOPE").unwrap();
    let s = unsafe { norden_report_check(r, id.as_ptr(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(s, NordenStatus::InvalidArgument);
    unsafe {
        norden_report_free(r);
        norden_manifold_free(m);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        norden_manifold_free(ptr::null_mut());
        norden_report_free(ptr::null_mut());
        norden_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { norden_manifold_dim(ptr::null()) }, 0);
    assert!(unsafe { norden_report_class(ptr::null()) }.is_null());
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "norden.h"

int main(int argc, char **argv) {
    NordenManifold *m = NULL;
    NordenReport *r = NULL;
    if (norden_manifold_load(argv[1], &m) != NORDEN_STATUS_OK) return 10;
    if (norden_verify(m, 1e-9, &r) != NORDEN_STATUS_OK) return 11;
    size_t pass = 0, fail = 0, na = 0;
    norden_report_counts(r, &pass, &fail, &na);
    printf("%s %zu %zu %zu\n", norden_report_class(r), pass, fail, na);
    if (norden_manifold_load("/nonexistent", &m) != NORDEN_STATUS_IO) return 12;
    if (strstr(norden_last_error_message(), "nonexistent") == NULL) return 13;
    norden_report_free(r);
    norden_manifold_free(m);
    return fail == 0 ? 0 : 1;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let lib = target_dir().join("libnorden_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/examples_manifests/flat_kahler_4.json");
    let out = Command::new(&bin).arg(&manifest).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("KAHLER_W0 "), "{stdout}");
}
