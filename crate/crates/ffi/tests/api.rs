use std::ffi::{CStr, CString};
use std::ptr;

use torsym_ffi::*;

const G: &str = r#"{"dim":3,"terms":[{"nu":[1,1,0],"sin":1},{"nu":[0,1,-1],"cos":-1},{"nu":[1,0,1],"sin":-1}]}"#;

fn load(json: &str) -> *mut TorsymPoly {
    let c = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { torsym_poly_from_json(c.as_ptr(), &mut p) }, TorsymStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let p = torsym_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn handle_lifecycle_and_evaluation() {
    let p = load(G);
    unsafe {
        assert_eq!(torsym_poly_dim(p), 3);
        assert_eq!(torsym_poly_n_terms(p), 3);
        let x = [0.0, 0.0, 0.0];
        let (mut v, mut e) = (0.0, 0.0);
        assert_eq!(torsym_poly_evaluate(p, x.as_ptr(), 3, &mut v, &mut e), TorsymStatus::Ok);
        assert!((v + 1.0).abs() <= e);
        assert_eq!(torsym_poly_evaluate(p, x.as_ptr(), 2, &mut v, &mut e), TorsymStatus::DimensionMismatch);
        assert!(last_error().contains('3'));
        assert_eq!(torsym_poly_evaluate(p, x.as_ptr(), 3, &mut v, ptr::null_mut()), TorsymStatus::Ok);
        torsym_poly_free(p);
        torsym_poly_free(ptr::null_mut());
    }
}

#[test]
fn bad_input_reports_status() {
    let bad = CString::new(r#"{"dim":2,"terms":[{"nu":[1,0],"sin":"x"}]}"#).unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(torsym_poly_from_json(bad.as_ptr(), &mut p), TorsymStatus::Malformed);
        assert!(p.is_null());
        assert_eq!(torsym_poly_from_json(ptr::null(), &mut p), TorsymStatus::NullPointer);
        let empty = CString::new(r#"{"dim":1,"terms":[{"nu":[1],"sin":0}]}"#).unwrap();
        assert_eq!(torsym_poly_from_json(empty.as_ptr(), &mut p), TorsymStatus::EmptyPolynomial);
        assert_eq!(torsym_poly_dim(ptr::null()), 0);
    }
}

#[test]
fn certify_counterexample_matches_reference() {
    let p = load(G);
    let mut cfg = torsym_certify_config_default(7);
    cfg.gradient_override = 6.0 * std::f64::consts::PI;
    let mut out = TorsymCertifyResult::default();
    unsafe {
        assert_eq!(torsym_certify_signs(p, &cfg, &mut out), TorsymStatus::Ok);
        assert_eq!(out.n_cells, 1 << 21);
        assert_eq!(out.m_negative, 1_123_200);
        assert_eq!(out.sound, 1);
        cfg.threshold_factor = 0.5;
        assert_eq!(torsym_certify_signs(p, &cfg, &mut out), TorsymStatus::InvalidConfig);
        torsym_poly_free(p);
    }
}

#[test]
fn semi_integral_search_json() {
    let f = load(r#"{"dim":2,"terms":[{"nu":[2,1],"sin":1},{"nu":[1,-2],"cos":"1/2"}]}"#);
    let g = load(G);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(torsym_find_semi_integral(f, &mut s), TorsymStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        torsym_string_free(s);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["found"], true);
        assert_eq!(v["certificate"]["u"], serde_json::json!(["1/2", "1/2"]));

        assert_eq!(torsym_find_semi_integral(g, &mut s), TorsymStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        torsym_string_free(s);
        assert_eq!(v["found"], false);
        assert_eq!(v["obstruction"]["equations"].as_array().unwrap().len(), 3);
        torsym_poly_free(f);
        torsym_poly_free(g);
    }
}
