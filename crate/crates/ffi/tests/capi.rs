use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qqlab_ffi::*;

fn q(a: f64, b: f64, c: f64, d: f64) -> QqlabQuaternion {
    QqlabQuaternion { c: [a, b, c, d] }
}

fn last_error() -> String {
    let p = qqlab_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn multiply_basis_units() {
    let mut out = q(0.0, 0.0, 0.0, 0.0);
    let s = unsafe { qqlab_quat_mul(q(0.0, 1.0, 0.0, 0.0), q(0.0, 0.0, 1.0, 0.0), &mut out) };
    assert_eq!(s, QqlabStatus::Ok);
    assert_eq!(out.c, [0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn null_out_is_reported() {
    let s = unsafe { qqlab_quat_mul(q(1.0, 0.0, 0.0, 0.0), q(1.0, 0.0, 0.0, 0.0), ptr::null_mut()) };
    assert_eq!(s, QqlabStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn zero_has_no_inverse() {
    let mut out = q(0.0, 0.0, 0.0, 0.0);
    let s = unsafe { qqlab_quat_inverse(q(0.0, 0.0, 0.0, 0.0), &mut out) };
    assert_eq!(s, QqlabStatus::Numeric);
    assert!(last_error().contains("division by zero"));
}

#[test]
fn qq_numbers() {
    let mut v = 0.0;
    assert_eq!(unsafe { qqlab_qq_number(3, 0.9, 0.5, &mut v) }, QqlabStatus::Ok);
    assert!((v - (0.81 + 0.45 + 0.25)).abs() < 1e-15);
    assert_eq!(unsafe { qqlab_qq_number(3, 0.5, 0.9, &mut v) }, QqlabStatus::InvalidArgument);
}

#[test]
fn kernel_and_frames() {
    let frame = qqlab_frame_standard();
    let tau = [1.0, 0.0, 0.0, 0.0];
    let x = [0.0; 4];
    let mut out = q(0.0, 0.0, 0.0, 0.0);
    let mut partials = [q(0.0, 0.0, 0.0, 0.0); 4];
    let s = unsafe { qqlab_kernel_eval(frame, tau.as_ptr(), x.as_ptr(), &mut out, partials.as_mut_ptr()) };
    assert_eq!(s, QqlabStatus::Ok);
    // K(1) = 1 / (2 pi^2)
    let c = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
    assert!((out.c[0] - c).abs() < 1e-15 && out.c[1..].iter().all(|v| v.abs() < 1e-15));
    assert!(partials.iter().any(|p| p.c.iter().any(|v| *v != 0.0)));
    let s = unsafe { qqlab_kernel_eval(frame, x.as_ptr(), x.as_ptr(), &mut out, ptr::null_mut()) };
    assert_eq!(s, QqlabStatus::Numeric);
    unsafe { qqlab_frame_free(frame) };

    let bad = [1.0; 16];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qqlab_frame_new(bad.as_ptr(), &mut f) }, QqlabStatus::InvalidArgument);
    assert!(f.is_null());
    let mut rows = [0.0; 16];
    for k in 0..4 {
        rows[5 * k] = 1.0;
    }
    assert_eq!(unsafe { qqlab_frame_new(rows.as_ptr(), &mut f) }, QqlabStatus::Ok);
    unsafe { qqlab_frame_free(f) };
}

#[test]
fn run_small_suite() {
    let cfg = CString::new(r#"{"cases": ["conjugation", "kernel-regularity"]}"#).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { qqlab_run_suite(cfg.as_ptr(), 1, true, &mut rep) }, QqlabStatus::Ok);
    let rows = unsafe { qqlab_report_row_count(rep) };
    assert!(rows > 0);
    assert_eq!(unsafe { qqlab_report_fail_count(rep) }, 0);
    assert_eq!(unsafe { qqlab_report_exit_code(rep) }, 0);
    let csv = unsafe { qqlab_report_csv(rep) };
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_string();
    assert!(text.starts_with("case_id,point,lhs,rhs,abs_residual,rel_residual,verdict,seconds"));
    assert_eq!(text.lines().count(), rows + 1);
    unsafe {
        qqlab_string_free(csv);
        qqlab_report_free(rep);
    }
}

#[test]
fn bad_config_is_invalid_argument() {
    let cfg = CString::new(r#"{"colour": 1}"#).unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { qqlab_run_suite(cfg.as_ptr(), 0, true, &mut rep) }, QqlabStatus::InvalidArgument);
    assert!(rep.is_null());
    let cfg = CString::new(r#"{"cases": ["nope"]}"#).unwrap();
    assert_eq!(unsafe { qqlab_run_suite(cfg.as_ptr(), 0, true, &mut rep) }, QqlabStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
    assert_eq!(unsafe { qqlab_report_exit_code(ptr::null()) }, 2);
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "qqlab.h"

int main(void) {
    QqlabQuaternion a = {{0.0, 1.0, 0.0, 0.0}};
    QqlabQuaternion b = {{0.0, 0.0, 1.0, 0.0}};
    QqlabQuaternion c;
    if (qqlab_quat_mul(a, b, &c) != QQLAB_STATUS_OK) return 1;
    if (c.c[3] != 1.0) return 2;
    double v = 0.0;
    if (qqlab_qq_number(2, 0.5, 0.9, &v) != QQLAB_STATUS_INVALID_ARGUMENT) return 3;
    if (qqlab_last_error_message() == NULL) return 4;
    QqlabFrame *f = qqlab_frame_standard();
    qqlab_frame_free(f);
    printf("ok\n");
    return 0;
}
"#;

/// Compiles a small C program against the generated header and static
/// library. Skipped when no C compiler is installed.
#[test]
fn c_program_links_against_staticlib() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("qqlab.h").exists());
    // test binaries live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libqqlab_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
