use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use algdyn_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = algdyn_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str, arity: usize) -> *mut AlgdynPoly {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { algdyn_poly_parse(c(text).as_ptr(), arity, &mut p) }, AlgdynStatus::Ok);
    p
}

#[test]
fn poly_round_trip() {
    let p = parse("u1^2 + 2*u1 + 10", 1);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { algdyn_poly_format(p, &mut s) }, AlgdynStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "10 + 2*u1 + u1^2");
    unsafe {
        algdyn_string_free(s);
        algdyn_poly_free(p);
    }
    assert!(algdyn_last_error_message().is_null());
}

#[test]
fn mahler_values() {
    let p = parse("u1^2 + 2*u1 + 10", 1);
    let mut v = AlgdynValue::default();
    assert_eq!(unsafe { algdyn_mahler(p, ptr::null(), &mut v) }, AlgdynStatus::Ok);
    assert!((v.value - 10f64.ln()).abs() < 1e-12);
    unsafe { algdyn_poly_free(p) };

    let p = parse("1 + u1 + u2", 2);
    let q = AlgdynQuadrature { nodes: 0, depth: 0, tolerance: 1e-9 };
    assert_eq!(unsafe { algdyn_mahler(p, &q, &mut v) }, AlgdynStatus::Ok);
    assert!((v.value - 0.3230659472).abs() < 1e-8 && v.converged);
    unsafe { algdyn_poly_free(p) };
}

#[test]
fn error_statuses() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { algdyn_poly_parse(c("1 + ").as_ptr(), 2, &mut p) }, AlgdynStatus::ParseError);
    assert!(p.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { algdyn_poly_parse(ptr::null(), 2, &mut p) }, AlgdynStatus::NullPointer);
    assert_eq!(unsafe { algdyn_poly_parse(c("1").as_ptr(), 2, ptr::null_mut()) }, AlgdynStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { algdyn_poly_parse(bad.as_ptr().cast(), 2, &mut p) }, AlgdynStatus::InvalidUtf8);
    assert_eq!(unsafe { algdyn_poly_parse(c("1").as_ptr(), 0, &mut p) }, AlgdynStatus::InvalidInput);

    let p3 = parse("1 + u1 + u2 + u3", 3);
    let mut v = AlgdynValue::default();
    assert_eq!(unsafe { algdyn_mahler(p3, ptr::null(), &mut v) }, AlgdynStatus::InvalidInput);
    unsafe { algdyn_poly_free(p3) };

    let mut s = ptr::null_mut();
    let status = unsafe { algdyn_system_create(c("x").as_ptr(), c("1 + u1 + u2").as_ptr(), c("u3^-1 - 2").as_ptr(), &mut s) };
    assert_eq!(status, AlgdynStatus::InvalidInput);
    assert_eq!(last_error(), "g must be an ordinary polynomial");
    unsafe {
        algdyn_poly_free(ptr::null_mut());
        algdyn_system_free(ptr::null_mut());
        algdyn_string_free(ptr::null_mut());
    }
}

#[test]
fn system_queries() {
    let mut s = ptr::null_mut();
    let status = unsafe {
        algdyn_system_create(c("g1").as_ptr(), c("1 + u1 + u2").as_ptr(), c("u3^2 + 2*u3 + 10").as_ptr(), &mut s)
    };
    assert_eq!(status, AlgdynStatus::Ok);
    let mut et = AlgdynEtReport::default();
    assert_eq!(unsafe { algdyn_system_is_et(s, &mut et) }, AlgdynStatus::Ok);
    assert!(et.is_et && et.is_expanding && et.is_triangular && et.a == 1);

    let mut h = AlgdynEntropy { kind: AlgdynEntropyKind::PlanarStructural, value: AlgdynValue::default() };
    let basis = [1i64, 0, 0, 0, 1, -1];
    assert_eq!(unsafe { algdyn_sublattice_entropy(s, basis.as_ptr(), ptr::null(), &mut h) }, AlgdynStatus::Ok);
    assert_eq!(h.kind, AlgdynEntropyKind::Finite);
    assert!((h.value.value - 10f64.ln()).abs() < 1e-6);

    let planar = [1i64, 0, 0, 0, 1, 0];
    assert_eq!(unsafe { algdyn_sublattice_entropy(s, planar.as_ptr(), ptr::null(), &mut h) }, AlgdynStatus::Ok);
    assert_eq!(h.kind, AlgdynEntropyKind::PlanarStructural);
    assert!(h.value.value.is_nan());

    let axis = [1i64, 0, 0, 0, 0, 1];
    assert_eq!(unsafe { algdyn_sublattice_entropy(s, axis.as_ptr(), ptr::null(), &mut h) }, AlgdynStatus::Ok);
    assert_eq!(h.kind, AlgdynEntropyKind::MultipleOfLogMahlerG);
    assert!((h.value.value - 10f64.ln()).abs() < 1e-12);

    let singular = [1i64, 2, 3, 2, 4, 6];
    assert_eq!(unsafe { algdyn_sublattice_entropy(s, singular.as_ptr(), ptr::null(), &mut h) }, AlgdynStatus::InvalidInput);
    unsafe { algdyn_system_free(s) };
}

#[test]
fn system_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("helmet.sys");
    std::fs::write(&path, "name = \"helmet\"\nf = \"1 + u1 + u2\"\ng = \"u3 - 2\"\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { algdyn_system_load(c(path.to_str().unwrap()).as_ptr(), &mut s) }, AlgdynStatus::Ok);
    unsafe { algdyn_system_free(s) };
    std::fs::write(&path, "f = \"1 + u1 + u2\"\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { algdyn_system_load(c(path.to_str().unwrap()).as_ptr(), &mut s) }, AlgdynStatus::InvalidInput);
    assert_eq!(last_error(), "missing key g");
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/algdyn.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["algdyn_poly_parse", "algdyn_sublattice_entropy", "ALGDYN_STATUS_PANIC", "typedef struct AlgdynPoly AlgdynPoly"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        match Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header]).status() {
            Ok(status) => assert!(status.success(), "{compiler} rejected the header"),
            Err(_) => eprintln!("{compiler} not found; skipping"),
        }
    }
}
