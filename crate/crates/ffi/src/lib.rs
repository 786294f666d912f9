//! C interface to the qqlab core: quaternion products, the Cauchy kernel,
//! (q,q')-numbers and the verification suite.
//!
//! Every fallible call returns a [`QqlabStatus`]; the message of the last
//! failure on the calling thread is available from
//! [`qqlab_last_error_message`]. Handles are opaque and must be released
//! with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qqlab::harness::{run_suite, Config, RunOptions, Verdict, VerificationReport};
use qqlab::qq::{qq_number, QQPair};
use qqlab::quat::{Quaternion, StructuralSet};
use qqlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad config, parameters or structural set.
    InvalidArgument = 3,
    /// A numerical failure (pole hit, division by zero, ...).
    Numeric = 4,
    Io = 5,
    Panic = 6,
}

/// A quaternion `c[0] + c[1] e1 + c[2] e2 + c[3] e3`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqlabQuaternion {
    pub c: [f64; 4],
}

impl From<Quaternion> for QqlabQuaternion {
    fn from(q: Quaternion) -> Self {
        QqlabQuaternion { c: [q[0], q[1], q[2], q[3]] }
    }
}

impl From<QqlabQuaternion> for Quaternion {
    fn from(q: QqlabQuaternion) -> Self {
        Quaternion::from(q.c)
    }
}

/// Opaque structural set.
pub struct QqlabFrame {
    psi: StructuralSet,
}

/// Opaque verification report.
pub struct QqlabReport {
    report: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> QqlabStatus {
    match e {
        Error::Config(_)
        | Error::UnknownCase(_)
        | Error::InvalidBox(_)
        | Error::InvalidQuadSpec(_)
        | Error::InvalidParameters { .. }
        | Error::InvalidStructuralSet(_)
        | Error::NotOrthonormal { .. } => QqlabStatus::InvalidArgument,
        Error::Io(_) => QqlabStatus::Io,
        _ => QqlabStatus::Numeric,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (QqlabStatus, String)>) -> QqlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QqlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside qqlab");
            QqlabStatus::Panic
        }
    }
}

fn lift(e: Error) -> (QqlabStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QqlabStatus, String) {
    (QqlabStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qqlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_quat_mul(a: QqlabQuaternion, b: QqlabQuaternion, out: *mut QqlabQuaternion) -> QqlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = (Quaternion::from(a) * Quaternion::from(b)).into();
        Ok(())
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_quat_inverse(a: QqlabQuaternion, out: *mut QqlabQuaternion) -> QqlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Quaternion::from(a).inverse().map_err(lift)?.into();
        Ok(())
    })
}

/// `[n]_{q,q'}`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_qq_number(n: u32, q: f64, qp: f64, out: *mut f64) -> QqlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = qq_number(n, QQPair::new(q, qp).map_err(lift)?);
        Ok(())
    })
}

/// The standard frame `1, e1, e2, e3`. Never null.
#[no_mangle]
pub extern "C" fn qqlab_frame_standard() -> *mut QqlabFrame {
    Box::into_raw(Box::new(QqlabFrame { psi: StructuralSet::standard() }))
}

/// A frame from 16 reals, `psi_0 .. psi_3` row by row.
///
/// # Safety
/// `rows` must point to 16 readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_frame_new(rows: *const f64, out: *mut *mut QqlabFrame) -> QqlabStatus {
    guard(|| {
        if rows.is_null() {
            return Err(null("rows"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let v = std::slice::from_raw_parts(rows, 16);
        let psi = StructuralSet::from_rows(v).map_err(lift)?;
        *out = Box::into_raw(Box::new(QqlabFrame { psi }));
        Ok(())
    })
}

/// # Safety
/// `frame` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qqlab_frame_free(frame: *mut QqlabFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// The Cauchy kernel at `tau` with pole `x`, and its four partials in
/// `tau` when `partials` is not null.
///
/// # Safety
/// `tau` and `x` must point to 4 doubles, `out` must be valid for writes,
/// `partials` must be null or valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_kernel_eval(
    frame: *const QqlabFrame,
    tau: *const f64,
    x: *const f64,
    out: *mut QqlabQuaternion,
    partials: *mut QqlabQuaternion,
) -> QqlabStatus {
    guard(|| {
        if frame.is_null() || tau.is_null() || x.is_null() || out.is_null() {
            return Err(null("frame, tau, x or out"));
        }
        let t: [f64; 4] = std::slice::from_raw_parts(tau, 4).try_into().expect("length 4");
        let p: [f64; 4] = std::slice::from_raw_parts(x, 4).try_into().expect("length 4");
        let k = qqlab::kernel::kernel(&t, &p, &(*frame).psi).map_err(lift)?;
        *out = k.value.into();
        if !partials.is_null() {
            for (i, d) in k.partials.iter().enumerate() {
                *partials.add(i) = (*d).into();
            }
        }
        Ok(())
    })
}

/// Runs the suite for a JSON config (null or `""` means defaults).
/// `threads = 0` uses the default pool; `no_timing` zeroes timings.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qqlab_run_suite(config_json: *const c_char, threads: u32, no_timing: bool, out: *mut *mut QqlabReport) -> QqlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = if config_json.is_null() {
            Config::default()
        } else {
            let text = CStr::from_ptr(config_json).to_str().map_err(|e| (QqlabStatus::InvalidUtf8, e.to_string()))?;
            if text.trim().is_empty() {
                Config::default()
            } else {
                Config::from_json(text).map_err(lift)?
            }
        };
        let opts = RunOptions { threads: (threads > 0).then_some(threads as usize), no_timing };
        let report = run_suite(&config, opts).map_err(lift)?;
        *out = Box::into_raw(Box::new(QqlabReport { report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qqlab_report_row_count(report: *const QqlabReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.rows.len())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qqlab_report_fail_count(report: *const QqlabReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.count(Verdict::Fail))
}

/// 0 when every row passed or was skipped, 1 otherwise; 2 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qqlab_report_exit_code(report: *const QqlabReport) -> i32 {
    report.as_ref().map_or(2, |r| r.report.exit_code())
}

/// The report as CSV; free with [`qqlab_string_free`]. Null on failure.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qqlab_report_csv(report: *const QqlabReport) -> *mut c_char {
    let Some(r) = report.as_ref() else {
        set_error("report is null");
        return ptr::null_mut();
    };
    match catch_unwind(AssertUnwindSafe(|| r.report.csv_string())) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(_) => {
            set_error("panic inside qqlab");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qqlab_report_free(report: *mut QqlabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qqlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Config("x".into())), QqlabStatus::InvalidArgument);
        assert_eq!(status_of(&Error::PoleHit { distance: 0.0 }), QqlabStatus::Numeric);
    }

    #[test]
    fn error_message_is_thread_local() {
        set_error("boom");
        let here = unsafe { CStr::from_ptr(qqlab_last_error_message()) }.to_str().unwrap().to_string();
        assert_eq!(here, "boom");
        let other = std::thread::spawn(|| qqlab_last_error_message().is_null()).join().unwrap();
        assert!(other);
    }
}
