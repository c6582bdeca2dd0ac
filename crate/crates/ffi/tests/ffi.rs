use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gchaos_ffi::*;

fn tensor(dims: &[usize], data: &[f64]) -> *mut GchaosTensor {
    let mut t = ptr::null_mut();
    let s = unsafe { gchaos_tensor_new(dims.as_ptr(), dims.len(), data.as_ptr(), data.len(), &mut t) };
    assert_eq!(s, GchaosStatus::Ok);
    t
}

fn last_error() -> String {
    let p = gchaos_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn norms_and_bounds() {
    let t = tensor(&[2, 2], &[3.0, 0.0, 0.0, 4.0]);
    let mut v = 0.0;
    unsafe {
        assert_eq!(gchaos_hs_norm(t, &mut v), GchaosStatus::Ok);
        assert!((v - 5.0).abs() < 1e-12);
        assert_eq!(gchaos_operator_norm_2d(t, &mut v), GchaosStatus::Ok);
        assert!((v - 4.0).abs() < 1e-12);
        let p = CString::new("{1}{2}").unwrap();
        assert_eq!(gchaos_partition_norm(t, p.as_ptr(), 4, 1, &mut v), GchaosStatus::Ok);
        assert!((v - 4.0).abs() < 1e-10);
        assert_eq!(gchaos_hanson_wright_bound(t, 4.0, &mut v), GchaosStatus::Ok);
        assert!((v - (2.0 * 5.0 + 4.0 * 4.0)).abs() < 1e-10);
        // partitions {1,2} and {1}{2}: p^{1/2} 5 + p 4
        assert_eq!(gchaos_partition_moment_bound(t, 4.0, 4, 1, &mut v), GchaosStatus::Ok);
        assert!((v - 26.0).abs() < 1e-9);
        let (mut m, mut se) = (0.0, 0.0);
        assert_eq!(gchaos_sample_moment(t, 2.0, 100_000, 3, true, &mut m, &mut se), GchaosStatus::Ok);
        assert!((m - 5.0).abs() <= 4.0 * se);
        gchaos_tensor_free(t);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut t = ptr::null_mut();
    unsafe {
        let dims = [2usize, 2];
        let data = [1.0, 2.0, 3.0];
        assert_eq!(gchaos_tensor_new(dims.as_ptr(), 2, data.as_ptr(), 3, &mut t), GchaosStatus::Shape);
        assert!(t.is_null());
        assert!(last_error().contains("shape"));

        let json = CString::new("{\"dims\":[2,").unwrap();
        assert_eq!(gchaos_tensor_from_json(json.as_ptr(), &mut t), GchaosStatus::Parse);
        assert!(last_error().contains("line"));

        let mut v = 0.0;
        assert_eq!(gchaos_hs_norm(ptr::null(), &mut v), GchaosStatus::NullPointer);
        let cube = tensor(&[2, 2, 2], &[1.0; 8]);
        assert_eq!(gchaos_operator_norm_2d(cube, &mut v), GchaosStatus::Shape);
        assert_eq!(gchaos_hanson_wright_bound(cube, 0.5, &mut v), GchaosStatus::Shape);
        let p = CString::new("{1}{2}").unwrap();
        assert_eq!(gchaos_partition_norm(cube, p.as_ptr(), 4, 0, &mut v), GchaosStatus::Shape);
        assert_eq!(gchaos_hs_norm(cube, ptr::null_mut()), GchaosStatus::NullPointer);
        assert_eq!(gchaos_hs_norm(cube, &mut v), GchaosStatus::Ok);
        assert!(gchaos_last_error_message().is_null());
        gchaos_tensor_free(cube);
        gchaos_tensor_free(ptr::null_mut());
    }
}

#[test]
fn json_tensor_and_metrics() {
    unsafe {
        let json = CString::new("{\"dims\":[3],\"data\":[1,2,2]}").unwrap();
        let mut t = ptr::null_mut();
        assert_eq!(gchaos_tensor_from_json(json.as_ptr(), &mut t), GchaosStatus::Ok);
        assert_eq!(gchaos_tensor_order(t), 1);
        let mut v = 0.0;
        assert_eq!(gchaos_hs_norm(t, &mut v), GchaosStatus::Ok);
        assert_eq!(v, 3.0);
        gchaos_tensor_free(t);

        let dist = [0.0, 0.7, 0.7, 0.0];
        let mut m = ptr::null_mut();
        assert_eq!(gchaos_metric_new(2, dist.as_ptr(), &mut m), GchaosStatus::Ok);
        assert_eq!(gchaos_gamma(m, &mut v), GchaosStatus::Ok);
        assert_eq!(v, 0.7);
        assert_eq!(gchaos_dudley(m, &mut v), GchaosStatus::Ok);
        assert!((v - 0.7 * 2f64.ln().sqrt()).abs() < 1e-12);
        gchaos_metric_free(m);

        let bad = [0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0];
        assert_eq!(gchaos_metric_new(3, bad.as_ptr(), &mut m), GchaosStatus::Argument);

        let pts = [0.0, 0.0, 3.0, 4.0];
        assert_eq!(gchaos_metric_from_points(pts.as_ptr(), 2, 2, &mut m), GchaosStatus::Ok);
        assert_eq!(gchaos_gamma(m, &mut v), GchaosStatus::Ok);
        assert_eq!(v, 5.0);
        gchaos_metric_free(m);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gchaos.h")).unwrap();
    for name in [
        "gchaos_last_error_message",
        "gchaos_tensor_new",
        "gchaos_tensor_from_json",
        "gchaos_tensor_free",
        "gchaos_tensor_order",
        "gchaos_hs_norm",
        "gchaos_operator_norm_2d",
        "gchaos_partition_norm",
        "gchaos_sample_moment",
        "gchaos_partition_moment_bound",
        "gchaos_hanson_wright_bound",
        "gchaos_metric_new",
        "gchaos_metric_from_points",
        "gchaos_metric_free",
        "gchaos_gamma",
        "gchaos_dudley",
        "GCHAOS_STATUS_OK",
        "typedef struct GchaosTensor GchaosTensor",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}

// Builds and runs tests/c/smoke.c against the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libgchaos_ffi.a");
    assert!(lib.exists(), "{} was not built", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gchaos-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
