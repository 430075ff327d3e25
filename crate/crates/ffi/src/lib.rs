//! C ABI over the `qtransport` library.
//!
//! Every entry point returns a [`QtStatus`] and writes results through out
//! pointers. On failure a description is available from
//! [`qt_last_error_message`] on the same thread. Panics are caught at the
//! boundary and reported as [`QtStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qtransport::model::{propagate_schedule, Schedule, Sign};
use qtransport::quantum::{transport_check, GridSpec};
use qtransport::synthesis::{build_schedule_signed, limit_curve, minimum_time, SynthesisResult};
use qtransport::verification::{integrate_ode, IntegratorConfig};
use qtransport::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    NonFinite = 4,
    NotExtremal = 5,
    Infeasible = 6,
    Structural = 7,
    Resolution = 8,
    Grid = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

impl From<&Error> for QtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => QtStatus::InvalidParameter,
            Error::Domain(_) => QtStatus::Domain,
            Error::NonFinite(_) => QtStatus::NonFinite,
            Error::NotExtremal(_) => QtStatus::NotExtremal,
            Error::Infeasible { .. } => QtStatus::Infeasible,
            Error::Structural(_) => QtStatus::Structural,
            Error::Resolution(_) => QtStatus::Resolution,
            Error::Grid(_) => QtStatus::Grid,
        }
    }
}

/// Phase-space point `(x1, x2, x3)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QtState {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QtTransportReport {
    pub fidelity: f64,
    pub phase_error: f64,
    pub heating: f64,
    pub measured_phase: f64,
    pub predicted_phase: f64,
    pub total_time: f64,
    pub distance: f64,
}

/// Opaque synthesized schedule. Free with [`qt_synthesis_free`].
pub struct QtSynthesis {
    inner: SynthesisResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QtStatus, msg: impl Into<String>) -> QtStatus {
    set_last_error(msg.into());
    status
}

fn from_error(e: Error) -> QtStatus {
    fail(QtStatus::from(&e), e.to_string())
}

fn guard<F: FnOnce() -> QtStatus>(f: F) -> QtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(QtStatus::Panic, "internal panic"),
    }
}

/// Borrowed view of a caller-owned duration array.
unsafe fn schedule_from_raw(
    initial_sign: i32,
    durations: *const f64,
    len: usize,
) -> Result<Schedule, QtStatus> {
    if durations.is_null() && len > 0 {
        return Err(fail(QtStatus::NullPointer, "durations is null"));
    }
    let sign = match initial_sign {
        1 => Sign::Plus,
        -1 => Sign::Minus,
        other => {
            return Err(fail(
                QtStatus::InvalidParameter,
                format!("initial_sign must be +1 or -1, got {other}"),
            ))
        }
    };
    let d = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(durations, len).to_vec()
    };
    Schedule::new(sign, d).map_err(from_error)
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qt_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(
        concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes(),
    ) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Minimum-time schedule for `gamma` (negative values are mirrored).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesize(
    gamma: f64,
    eps_bang: f64,
    out: *mut *mut QtSynthesis,
) -> QtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QtStatus::NullPointer, "out is null");
        }
        match build_schedule_signed(gamma, eps_bang) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QtSynthesis { inner }));
                QtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `handle` must come from [`qt_synthesize`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_free(handle: *mut QtSynthesis) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn with_handle<F>(handle: *const QtSynthesis, f: F) -> QtStatus
where
    F: FnOnce(&SynthesisResult) -> QtStatus,
{
    guard(|| match handle.as_ref() {
        Some(h) => f(&h.inner),
        None => fail(QtStatus::NullPointer, "handle is null"),
    })
}

unsafe fn write_out<T>(out: *mut T, value: T) -> QtStatus {
    match out.as_mut() {
        Some(slot) => {
            *slot = value;
            QtStatus::Ok
        }
        None => fail(QtStatus::NullPointer, "out is null"),
    }
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_rho(handle: *const QtSynthesis, out: *mut u32) -> QtStatus {
    with_handle(handle, |r| write_out(out, r.rho))
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_tau(handle: *const QtSynthesis, out: *mut f64) -> QtStatus {
    with_handle(handle, |r| write_out(out, r.tau))
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_total_time(
    handle: *const QtSynthesis,
    out: *mut f64,
) -> QtStatus {
    with_handle(handle, |r| write_out(out, r.total_time))
}

/// Control of the first arc, `+1` or `-1`.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_initial_sign(
    handle: *const QtSynthesis,
    out: *mut i32,
) -> QtStatus {
    with_handle(handle, |r| {
        write_out(out, i32::from(r.schedule.initial_sign().as_i8()))
    })
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_segment_count(
    handle: *const QtSynthesis,
    out: *mut usize,
) -> QtStatus {
    with_handle(handle, |r| write_out(out, r.schedule.len()))
}

/// Copies the arc durations into `buf`. `written` always receives the
/// number of durations; if `capacity` is smaller nothing is copied and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `handle` must be live; `buf` must hold `capacity` doubles (may be null
/// when `capacity` is 0); `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_durations(
    handle: *const QtSynthesis,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> QtStatus {
    with_handle(handle, |r| {
        let d = r.schedule.durations();
        let status = write_out(written, d.len());
        if status != QtStatus::Ok {
            return status;
        }
        if capacity < d.len() {
            return fail(
                QtStatus::BufferTooSmall,
                format!("need {} doubles, got {capacity}", d.len()),
            );
        }
        if buf.is_null() && !d.is_empty() {
            return fail(QtStatus::NullPointer, "buf is null");
        }
        ptr::copy_nonoverlapping(d.as_ptr(), buf, d.len());
        QtStatus::Ok
    })
}

/// JSON rendering of the synthesis. Release with [`qt_string_free`].
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_synthesis_to_json(
    handle: *const QtSynthesis,
    out: *mut *mut c_char,
) -> QtStatus {
    with_handle(handle, |r| {
        let s = serde_json::to_string(r).expect("synthesis serializes");
        match CString::new(s) {
            Ok(c) => write_out(out, c.into_raw()),
            Err(_) => fail(QtStatus::Panic, "interior NUL in JSON"),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_minimum_time(gamma: f64, out: *mut f64) -> QtStatus {
    guard(|| match minimum_time(gamma) {
        Ok(t) => write_out(out, t),
        Err(e) => from_error(e),
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_limit_curve(gamma_bar: f64, out: *mut f64) -> QtStatus {
    guard(|| match limit_curve(gamma_bar) {
        Ok(t) => write_out(out, t),
        Err(e) => from_error(e),
    })
}

/// Closed-form endpoint of the schedule from the origin.
///
/// # Safety
/// `durations` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_propagate(
    initial_sign: i32,
    durations: *const f64,
    len: usize,
    out: *mut QtState,
) -> QtStatus {
    guard(|| {
        let s = match schedule_from_raw(initial_sign, durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let x = propagate_schedule(&s);
        write_out(out, QtState { x1: x.x1, x2: x.x2, x3: x.x3 })
    })
}

/// RK4 endpoint of the schedule with fixed `step`.
///
/// # Safety
/// `durations` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_integrate_ode(
    initial_sign: i32,
    durations: *const f64,
    len: usize,
    step: f64,
    out: *mut QtState,
) -> QtStatus {
    guard(|| {
        let s = match schedule_from_raw(initial_sign, durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config = match IntegratorConfig::new(step) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        let x = integrate_ode(&s, &config);
        write_out(out, QtState { x1: x.x1, x2: x.x2, x3: x.x3 })
    })
}

/// Transports eigenstate `level` over `gamma` at trap speed `vmax` on the
/// default domain `[-10, d + 10]` with `n_points` samples and step `dt`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_transport_check(
    level: u32,
    gamma: f64,
    vmax: f64,
    n_points: usize,
    dt: f64,
    out: *mut QtTransportReport,
) -> QtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QtStatus::NullPointer, "out is null");
        }
        let run = || -> Result<QtTransportReport, Error> {
            let grid = GridSpec::with_points(gamma * vmax, n_points, dt)?;
            let r = transport_check(level as usize, gamma, vmax, &grid)?;
            Ok(QtTransportReport {
                fidelity: r.fidelity,
                phase_error: r.phase_error,
                heating: r.heating,
                measured_phase: r.measured_phase,
                predicted_phase: r.predicted_phase,
                total_time: r.total_time,
                distance: r.distance,
            })
        };
        match run() {
            Ok(report) => write_out(out, report),
            Err(e) => from_error(e),
        }
    })
}
