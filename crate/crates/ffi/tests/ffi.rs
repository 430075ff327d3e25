use std::f64::consts::PI;
use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use qtransport_ffi::*;

fn last_error() -> String {
    let p = qt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn synthesize_and_read_back() {
    unsafe {
        let mut h: *mut QtSynthesis = ptr::null_mut();
        assert_eq!(qt_synthesize(2.4 * PI, 1e-9, &mut h), QtStatus::Ok);
        let mut rho = 0u32;
        assert_eq!(qt_synthesis_rho(h, &mut rho), QtStatus::Ok);
        assert_eq!(rho, 2);
        let mut n = 0usize;
        assert_eq!(qt_synthesis_segment_count(h, &mut n), QtStatus::Ok);
        assert_eq!(n, 5);
        let mut sign = 0i32;
        assert_eq!(qt_synthesis_initial_sign(h, &mut sign), QtStatus::Ok);
        assert_eq!(sign, 1);

        let mut buf = [0.0f64; 5];
        let mut written = 0usize;
        assert_eq!(qt_synthesis_durations(h, buf.as_mut_ptr(), 5, &mut written), QtStatus::Ok);
        assert_eq!(written, 5);
        assert_eq!(buf[0], buf[4]);

        let mut end = QtState::default();
        assert_eq!(qt_propagate(1, buf.as_ptr(), 5, &mut end), QtStatus::Ok);
        assert!((end.x1 - 2.4 * PI).abs() < 1e-9 && end.x2.abs() < 1e-9);

        let mut t = 0.0;
        assert_eq!(qt_synthesis_total_time(h, &mut t), QtStatus::Ok);
        let mut t2 = 0.0;
        assert_eq!(qt_minimum_time(2.4 * PI, &mut t2), QtStatus::Ok);
        assert_eq!(t, t2);
        qt_synthesis_free(h);
    }
}

#[test]
fn short_buffer_reports_required_length() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qt_synthesize(PI, 1e-9, &mut h), QtStatus::Ok);
        let mut buf = [0.0f64; 2];
        let mut written = 0usize;
        let status = qt_synthesis_durations(h, buf.as_mut_ptr(), 2, &mut written);
        assert_eq!(status, QtStatus::BufferTooSmall);
        assert_eq!(written, 3);
        assert_eq!(buf, [0.0, 0.0]);
        qt_synthesis_free(h);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qt_synthesize(-PI, 1e-9, &mut h), QtStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(qt_synthesis_to_json(h, &mut s), QtStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        qt_string_free(s);
        qt_synthesis_free(h);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["initial_sign"], -1);
        assert_eq!(v["durations"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qt_synthesize(f64::NAN, 1e-9, &mut h), QtStatus::NonFinite);
        assert!(last_error().contains("gamma"));
        assert_eq!(qt_synthesize(1.0, 1e-9, ptr::null_mut()), QtStatus::NullPointer);
        let mut t = 0.0;
        assert_eq!(qt_limit_curve(7.0, &mut t), QtStatus::Domain);
        assert_eq!(qt_synthesis_rho(ptr::null(), &mut 0), QtStatus::NullPointer);

        let bad = [1.0, -1.0];
        let mut x = QtState::default();
        assert_eq!(qt_propagate(1, bad.as_ptr(), 2, &mut x), QtStatus::InvalidParameter);
        assert_eq!(qt_propagate(0, bad.as_ptr(), 1, &mut x), QtStatus::InvalidParameter);
        assert_eq!(qt_propagate(1, ptr::null(), 2, &mut x), QtStatus::NullPointer);
        assert_eq!(qt_integrate_ode(1, bad.as_ptr(), 1, 0.0, &mut x), QtStatus::InvalidParameter);

        let mut r = QtTransportReport::default();
        assert_eq!(qt_transport_check(0, PI, 1.0, 1000, 1e-3, &mut r), QtStatus::Grid);
        qt_synthesis_free(ptr::null_mut());
        qt_string_free(ptr::null_mut());
    }
}

#[test]
fn rk4_matches_closed_form() {
    let d = [1.2, 0.4, 2.9, 5.5];
    let (mut a, mut b) = (QtState::default(), QtState::default());
    unsafe {
        assert_eq!(qt_propagate(-1, d.as_ptr(), 4, &mut a), QtStatus::Ok);
        assert_eq!(qt_integrate_ode(-1, d.as_ptr(), 4, 1e-3, &mut b), QtStatus::Ok);
    }
    assert!((a.x1 - b.x1).abs() < 1e-9 && (a.x2 - b.x2).abs() < 1e-9);
    assert_eq!(a.x3, -1.2 + 0.4 - 2.9 + 5.5);
}

#[test]
fn transport_check_ground_state() {
    let mut r = QtTransportReport::default();
    let status = unsafe { qt_transport_check(0, PI, 1.0, 1024, 2e-3, &mut r) };
    assert_eq!(status, QtStatus::Ok);
    assert!(r.fidelity > 0.999, "{r:?}");
    assert!(r.phase_error.abs() < 1e-2);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qtransport.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "qt_last_error_message",
        "qt_version",
        "qt_synthesize",
        "qt_synthesis_free",
        "qt_synthesis_rho",
        "qt_synthesis_tau",
        "qt_synthesis_total_time",
        "qt_synthesis_initial_sign",
        "qt_synthesis_segment_count",
        "qt_synthesis_durations",
        "qt_synthesis_to_json",
        "qt_string_free",
        "qt_minimum_time",
        "qt_limit_curve",
        "qt_propagate",
        "qt_integrate_ode",
        "qt_transport_check",
        "QT_STATUS_OK = 0",
        "typedef struct QtSynthesis QtSynthesis;",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"qtransport.h\"\nint main(void) { QtSynthesis *h = 0; QtStatus s = qt_synthesize(1.0, 1e-9, &h); return (int)s; }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = match Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&header)
        .arg(&src)
        .output()
    {
        Ok(o) => o,
        Err(e) => {
            eprintln!("skipping C compile check: {cc} unavailable ({e})");
            return;
        }
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qtransport-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
