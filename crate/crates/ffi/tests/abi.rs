use std::ffi::{CStr, CString};
use std::ptr;

use warpfield_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wf_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn torpedo_certificate_round_trip() {
    unsafe {
        let mut prof = ptr::null_mut();
        assert_eq!(wf_torpedo(0.1, 0.5, &mut prof), WfStatus::Ok);
        assert!((wf_profile_r_max(prof) - 0.5).abs() < 1e-15);
        let mut f = 0.0;
        assert_eq!(wf_profile_eval(prof, 0.4, &mut f, ptr::null_mut(), ptr::null_mut()), WfStatus::Ok);
        assert!((f - 0.1).abs() < 1e-12);

        let mut cert = ptr::null_mut();
        assert_eq!(wf_certificate_new(prof, 3, 2048, 0.0, &mut cert), WfStatus::Ok);
        assert!(wf_certificate_pass(cert));
        assert!(wf_certificate_r_min(cert) >= 200.0 * (1.0 - 1e-12));
        let json = wf_certificate_json(cert);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        wf_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["pass"], true);
        wf_certificate_free(cert);

        let mut r = 0.0;
        assert_eq!(wf_scalar_curvature(prof, 3, 0.45, &mut r), WfStatus::Ok);
        assert!((r - 200.0).abs() < 1e-9);
        assert_eq!(wf_profile_eval(prof, 2.0, &mut f, ptr::null_mut(), ptr::null_mut()), WfStatus::InvalidArgument);
        assert!(last_error().contains("outside"));
        wf_profile_free(prof);
    }
}

#[test]
fn isotopy_and_retract_paths() {
    unsafe {
        let knots = [0.0, 1.0];
        let (f, d1, d2) = ([0.0, 1.0], [1.0, 1.0], [0.0, 0.0]);
        let mut flat = ptr::null_mut();
        assert_eq!(wf_profile_new(knots.as_ptr(), f.as_ptr(), d1.as_ptr(), d2.as_ptr(), 2, true, &mut flat), WfStatus::Ok);

        let cfg = CString::new(r#"{"steps": 16}"#).unwrap();
        let mut path = ptr::null_mut();
        assert_eq!(wf_isotopy(flat, 2, 2, cfg.as_ptr(), &mut path), WfStatus::Ok, "{}", last_error());
        assert!(wf_path_all_pass(path));
        assert!(wf_path_worst_r_min(path) > 0.0);
        let n = wf_path_len(path);
        let mut end = ptr::null_mut();
        assert_eq!(wf_path_profile(path, n - 1, &mut end), WfStatus::Ok);
        assert_eq!(wf_path_profile(path, n, &mut ptr::null_mut()), WfStatus::InvalidArgument);
        wf_path_free(path);

        // the endpoint is standard: its retraction is constant
        let mut again = ptr::null_mut();
        assert_eq!(wf_retract(end, wf_profile_r_max(end), 2, 2, cfg.as_ptr(), &mut again), WfStatus::Ok, "{}", last_error());
        assert!(wf_path_all_pass(again));
        wf_path_free(again);
        wf_profile_free(end);

        // linear w is case 4
        let mut r = ptr::null_mut();
        assert_eq!(wf_retract(flat, 1.0, 2, 2, ptr::null(), &mut r), WfStatus::Ok, "{}", last_error());
        assert!(wf_path_all_pass(r));
        wf_path_free(r);
        wf_profile_free(flat);
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut prof = ptr::null_mut();
        assert_eq!(wf_torpedo(-1.0, 0.0, &mut prof), WfStatus::InvalidArgument);
        assert!(prof.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(wf_torpedo(0.1, 0.0, ptr::null_mut()), WfStatus::NullPointer);
        assert_eq!(wf_profile_read_csv(ptr::null(), &mut prof), WfStatus::NullPointer);
        let missing = CString::new("/nonexistent/profile.csv").unwrap();
        assert_eq!(wf_profile_read_csv(missing.as_ptr(), &mut prof), WfStatus::Io);

        // strictly convex: not almost-standard
        let knots = [0.0, 0.5, 1.0];
        let f: Vec<f64> = knots.iter().map(|r| r + r * r * r).collect();
        let d1: Vec<f64> = knots.iter().map(|r| 1.0 + 3.0 * r * r).collect();
        let d2: Vec<f64> = knots.iter().map(|r| 6.0 * r).collect();
        let mut w = ptr::null_mut();
        assert_eq!(wf_profile_new(knots.as_ptr(), f.as_ptr(), d1.as_ptr(), d2.as_ptr(), 3, true, &mut w), WfStatus::Ok);
        let mut path = ptr::null_mut();
        assert_eq!(wf_retract(w, 1.0, 2, 2, ptr::null(), &mut path), WfStatus::MathFailure);
        assert!(path.is_null());
        let bad_cfg = CString::new("{\"steps\":").unwrap();
        assert_eq!(wf_retract(w, 1.0, 2, 2, bad_cfg.as_ptr(), &mut path), WfStatus::Parse);
        wf_profile_free(w);

        // NULL is accepted by every free
        wf_profile_free(ptr::null_mut());
        wf_path_free(ptr::null_mut());
        wf_certificate_free(ptr::null_mut());
        wf_string_free(ptr::null_mut());
    }
}

#[test]
fn surgery_through_json() {
    let x = CString::new(
        r#"{"side":"X","p":2,"q":4,"rho_bar":1.0,"rho":0.07853981633974483,"delta":0.05,"exterior":{"tag":"E"}}"#,
    )
    .unwrap();
    unsafe {
        let mut y = ptr::null_mut();
        assert_eq!(wf_surgery(x.as_ptr(), false, &mut y), WfStatus::Ok, "{}", last_error());
        let mut back = ptr::null_mut();
        assert_eq!(wf_surgery(y, true, &mut back), WfStatus::Ok);
        let yv: serde_json::Value = serde_json::from_str(CStr::from_ptr(y).to_str().unwrap()).unwrap();
        assert_eq!((yv["p"].as_u64(), yv["q"].as_u64()), (Some(4), Some(2)));
        let a: serde_json::Value = serde_json::from_str(x.to_str().unwrap()).unwrap();
        let mut b: serde_json::Value = serde_json::from_str(CStr::from_ptr(back).to_str().unwrap()).unwrap();
        // the absent collar field comes back as its default
        b["exterior"].as_object_mut().unwrap().remove("collar_profile_csv");
        assert_eq!(a, b);
        wf_string_free(y);
        wf_string_free(back);
        assert_eq!(wf_surgery(x.as_ptr(), true, &mut y), WfStatus::InvalidArgument);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/warpfield.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in ["wf_torpedo", "wf_retract", "wf_surgery", "wf_last_error", "WF_STATUS_MATH_FAILURE"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
