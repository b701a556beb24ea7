//! C ABI over warpfield.
//!
//! Every object crosses the boundary as an opaque handle owned by the caller and
//! released with the matching `wf_*_free`. Functions return a [`WfStatus`]; on
//! failure `wf_last_error()` describes it (per thread, valid until the next call
//! on that thread). Panics are caught and reported as `WF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use warpfield::config::RunConfig;
use warpfield::curvature::{curvature_certificate, scalar_curvature, CurvatureCertificate};
use warpfield::isotopy::gromov_lawson_isotopy;
use warpfield::path::MetricPath;
use warpfield::radial::RadialProfile;
use warpfield::retract::deformation_retract;
use warpfield::surgery::{surgery_j, surgery_j_inv, StdMetricDescriptor};
use warpfield::torpedo::{torpedo_profile, TorpedoSpec};
use warpfield::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WfStatus {
    Ok = 0,
    /// a positivity claim failed (certificate, homotopy, admissibility)
    MathFailure = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    NullPointer = 5,
    Panic = 6,
}

pub struct WfProfile(RadialProfile);
pub struct WfCertificate(CurvatureCertificate);
pub struct WfPath(MetricPath);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> WfStatus {
    match e {
        _ if e.is_math_failure() => WfStatus::MathFailure,
        Error::Parse(_) => WfStatus::Parse,
        Error::Io(_) => WfStatus::Io,
        _ => WfStatus::InvalidArgument,
    }
}

// runs f, mapping errors and panics to a status and the last-error message
fn guard(f: impl FnOnce() -> Result<(), (WfStatus, String)>) -> WfStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WfStatus::Ok,
        Ok(Err((st, msg))) => {
            set_error(msg);
            st
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            WfStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (WfStatus, String)>;
}

impl<T> IntoFfi<T> for warpfield::Result<T> {
    fn ffi(self) -> Result<T, (WfStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (WfStatus, String) {
    (WfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (WfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (WfStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<T>(dst: *mut T, v: T, what: &str) -> Result<(), (WfStatus, String)> {
    if dst.is_null() {
        return Err(null(what));
    }
    dst.write(v);
    Ok(())
}

// NULL config means the defaults
unsafe fn config(json: *const c_char) -> Result<RunConfig, (WfStatus, String)> {
    if json.is_null() {
        return Ok(RunConfig::default());
    }
    RunConfig::from_json(str_arg(json, "config_json")?).ffi()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread ("" after a success).
#[no_mangle]
pub extern "C" fn wf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn wf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by a `wf_*` function that documents this.
#[no_mangle]
pub unsafe extern "C" fn wf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

// ---- profiles

/// Builds a profile from knot arrays of length `n` (r, f, f′, f″).
///
/// # Safety
/// All four arrays must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wf_profile_new(
    knots: *const f64,
    f: *const f64,
    d1: *const f64,
    d2: *const f64,
    n: usize,
    origin_smooth: bool,
    out_profile: *mut *mut WfProfile,
) -> WfStatus {
    guard(|| {
        if knots.is_null() || f.is_null() || d1.is_null() || d2.is_null() {
            return Err(null("knot array"));
        }
        let v = |p: *const f64| std::slice::from_raw_parts(p, n).to_vec();
        let prof = RadialProfile::new(v(knots), v(f), v(d1), v(d2), origin_smooth).ffi()?;
        out(out_profile, boxed(WfProfile(prof)), "out_profile")
    })
}

/// Reads a `r,f,d1,d2` CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_profile` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_profile_read_csv(path: *const c_char, out_profile: *mut *mut WfProfile) -> WfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let file = File::open(path).map_err(|e| (WfStatus::Io, format!("cannot read {path}: {e}")))?;
        let prof = RadialProfile::read_csv(file).ffi()?;
        out(out_profile, boxed(WfProfile(prof)), "out_profile")
    })
}

/// Torpedo profile f_δ on [0, b] (`b` ≤ 0 selects the cap δπ/2).
///
/// # Safety
/// `out_profile` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wf_torpedo(delta: f64, b: f64, out_profile: *mut *mut WfProfile) -> WfStatus {
    guard(|| {
        let spec = if b > 0.0 { TorpedoSpec::new(delta, b) } else { TorpedoSpec::infinitesimal(delta) };
        let prof = torpedo_profile(&spec).ffi()?;
        out(out_profile, boxed(WfProfile(prof)), "out_profile")
    })
}

/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_profile_r_max(profile: *const WfProfile) -> f64 {
    profile.as_ref().map_or(f64::NAN, |p| p.0.r_max())
}

/// f, f′, f″ at r.
///
/// # Safety
/// `profile` must be a live handle; the outputs writable (any may be NULL to skip).
#[no_mangle]
pub unsafe extern "C" fn wf_profile_eval(
    profile: *const WfProfile,
    r: f64,
    f: *mut f64,
    d1: *mut f64,
    d2: *mut f64,
) -> WfStatus {
    guard(|| {
        let j = handle(profile, "profile")?.0.eval(r).ffi()?;
        for (dst, v) in [(f, j.f), (d1, j.d1), (d2, j.d2)] {
            if !dst.is_null() {
                dst.write(v);
            }
        }
        Ok(())
    })
}

/// Writes the profile as `r,f,d1,d2` CSV.
///
/// # Safety
/// `profile` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wf_profile_write_csv(profile: *const WfProfile, path: *const c_char) -> WfStatus {
    guard(|| {
        let p = handle(profile, "profile")?;
        let path = str_arg(path, "path")?;
        let file = File::create(path).map_err(|e| (WfStatus::Io, format!("cannot write {path}: {e}")))?;
        p.0.write_csv(BufWriter::new(file)).ffi()
    })
}

/// # Safety
/// `profile` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wf_profile_free(profile: *mut WfProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

// ---- curvature

/// Scalar curvature of dr² + f(r)² ds²_{n−1} at r.
///
/// # Safety
/// `profile` must be a live handle; `out_r` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_scalar_curvature(profile: *const WfProfile, n: usize, r: f64, out_r: *mut f64) -> WfStatus {
    guard(|| {
        let v = scalar_curvature(&handle(profile, "profile")?.0, n, r).ffi()?;
        out(out_r, v, "out_r")
    })
}

/// Grid certificate of R > margin. A failing certificate is still returned
/// (status OK); inspect `wf_certificate_pass`.
///
/// # Safety
/// `profile` must be a live handle; `out_cert` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_new(
    profile: *const WfProfile,
    n: usize,
    points: usize,
    margin: f64,
    out_cert: *mut *mut WfCertificate,
) -> WfStatus {
    guard(|| {
        let c = curvature_certificate(&handle(profile, "profile")?.0, n, points, margin).ffi()?;
        out(out_cert, boxed(WfCertificate(c)), "out_cert")
    })
}

/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_pass(cert: *const WfCertificate) -> bool {
    cert.as_ref().is_some_and(|c| c.0.pass)
}

/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_r_min(cert: *const WfCertificate) -> f64 {
    cert.as_ref().map_or(f64::NAN, |c| c.0.r_min)
}

/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_r_min_location(cert: *const WfCertificate) -> f64 {
    cert.as_ref().map_or(f64::NAN, |c| c.0.r_min_location)
}

/// Certificate JSON; free with `wf_string_free`. NULL if `cert` is NULL.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_json(cert: *const WfCertificate) -> *mut c_char {
    cert.as_ref().map_or(ptr::null_mut(), |c| c_string(c.0.to_json()))
}

/// # Safety
/// `cert` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wf_certificate_free(cert: *mut WfCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

// ---- paths

/// Isotopy of a tube profile to torpedo form. `config_json` may be NULL.
///
/// # Safety
/// `ambient` must be a live handle; `config_json` NULL or NUL-terminated; `out_path` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_isotopy(
    ambient: *const WfProfile,
    p: usize,
    q: usize,
    config_json: *const c_char,
    out_path: *mut *mut WfPath,
) -> WfStatus {
    guard(|| {
        let cfg = config(config_json)?;
        let path = gromov_lawson_isotopy(&handle(ambient, "ambient")?.0, p, q, &cfg).ffi()?;
        out(out_path, boxed(WfPath(path)), "out_path")
    })
}

/// Deformation retract of an almost-standard profile. `config_json` may be NULL.
///
/// # Safety
/// `w` must be a live handle; `config_json` NULL or NUL-terminated; `out_path` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_retract(
    w: *const WfProfile,
    rho_std: f64,
    p: usize,
    q: usize,
    config_json: *const c_char,
    out_path: *mut *mut WfPath,
) -> WfStatus {
    guard(|| {
        let cfg = config(config_json)?;
        let path = deformation_retract(&handle(w, "w")?.0, rho_std, p, q, &cfg).ffi()?;
        out(out_path, boxed(WfPath(path)), "out_path")
    })
}

/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_path_len(path: *const WfPath) -> usize {
    path.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_path_all_pass(path: *const WfPath) -> bool {
    path.as_ref().is_some_and(|p| p.0.all_pass())
}

/// Smallest certified R_min along the path (NaN for NULL or empty).
///
/// # Safety
/// `path` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wf_path_worst_r_min(path: *const WfPath) -> f64 {
    path.as_ref().and_then(|p| p.0.worst()).map_or(f64::NAN, |(_, r)| r)
}

/// Copy of the profile at step `index` (the last step is `len − 1`).
///
/// # Safety
/// `path` must be a live handle; `out_profile` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_path_profile(path: *const WfPath, index: usize, out_profile: *mut *mut WfProfile) -> WfStatus {
    guard(|| {
        let p = handle(path, "path")?;
        let step = p.0.steps.get(index).ok_or_else(|| {
            (WfStatus::InvalidArgument, format!("step {index} out of range (path has {})", p.0.len()))
        })?;
        out(out_profile, boxed(WfProfile(step.profile.clone())), "out_profile")
    })
}

/// Writes the path as `s,arc,f,R` CSV.
///
/// # Safety
/// `path` must be a live handle; `file` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wf_path_write_csv(path: *const WfPath, file: *const c_char) -> WfStatus {
    guard(|| {
        let p = handle(path, "path")?;
        let name = str_arg(file, "file")?;
        let f = File::create(name).map_err(|e| (WfStatus::Io, format!("cannot write {name}: {e}")))?;
        p.0.write_csv(BufWriter::new(f)).ffi()
    })
}

/// # Safety
/// `path` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wf_path_free(path: *mut WfPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

// ---- surgery

/// Applies j (`inverse` false) or j⁻¹ to a descriptor given as JSON; the result
/// JSON is written to `out_json` and must be freed with `wf_string_free`.
///
/// # Safety
/// `json` must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn wf_surgery(json: *const c_char, inverse: bool, out_json: *mut *mut c_char) -> WfStatus {
    guard(|| {
        let d = StdMetricDescriptor::from_json(str_arg(json, "json")?).ffi()?;
        let res = if inverse { surgery_j_inv(&d) } else { surgery_j(&d) }.ffi()?;
        out(out_json, c_string(res.to_json()), "out_json")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, WfStatus::Panic);
        let msg = unsafe { CStr::from_ptr(wf_last_error()) }.to_str().unwrap().to_string();
        assert!(msg.contains("boom"));
        assert_eq!(guard(|| Ok(())), WfStatus::Ok);
        assert_eq!(unsafe { CStr::from_ptr(wf_last_error()) }.to_bytes(), b"");
    }

    #[test]
    fn error_classes() {
        assert_eq!(status_of(&Error::NotAdmissible("x".into())), WfStatus::MathFailure);
        assert_eq!(status_of(&Error::Parse("x".into())), WfStatus::Parse);
        assert_eq!(status_of(&Error::Usage("x".into())), WfStatus::InvalidArgument);
    }
}
