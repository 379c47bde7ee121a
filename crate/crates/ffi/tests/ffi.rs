use std::ffi::{CStr, CString};
use std::ptr;

use taubex_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(taubex_last_error()) }.to_string_lossy().into_owned()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn stft_round_trip_through_handles() {
    unsafe {
        let mut f = ptr::null_mut();
        let mut w = ptr::null_mut();
        assert_eq!(taubex_signal_parse(c("gaussian").as_ptr(), &mut f), TaubexStatus::Ok);
        assert_eq!(taubex_window_parse(c("gaussian_pi").as_ptr(), &mut w), TaubexStatus::Ok);
        let mut m = ptr::null_mut();
        let st = taubex_stft(f, w, -6.0, 6.0, 0.1, -6.0, 6.0, 0.1, 0.0, &mut m);
        assert_eq!(st, TaubexStatus::Ok, "{}", last_error());
        let (mut nx, mut nxi) = (0usize, 0usize);
        assert_eq!(taubex_tf_dims(m, &mut nx, &mut nxi), TaubexStatus::Ok);
        assert_eq!((nx, nxi), (121, 121));

        let mut re = vec![0.0; nx * nxi];
        let mut im = vec![0.0; nx * nxi];
        assert_eq!(taubex_tf_values(m, re.as_mut_ptr(), im.as_mut_ptr(), re.len() - 1), TaubexStatus::InvalidArgument);
        assert_eq!(taubex_tf_values(m, re.as_mut_ptr(), im.as_mut_ptr(), re.len()), TaubexStatus::Ok);
        // V(0, 0) of two unit Gaussians is 2^{-1/2}
        let centre = 60 * nxi + 60;
        assert!((re[centre] - 0.5f64.sqrt()).abs() < 1e-6);

        let mut norm = 0.0;
        assert_eq!(taubex_tf_norm(m, 2.0, 2.0, ptr::null(), &mut norm), TaubexStatus::Ok);
        assert!((norm - 0.5f64.sqrt()).abs() < 1e-3);
        assert_eq!(taubex_tf_norm(m, 0.5, 2.0, ptr::null(), &mut norm), TaubexStatus::InvalidArgument);

        taubex_tf_free(m);
        taubex_window_free(w);
        taubex_signal_free(f);
    }
}

#[test]
fn tauber_report_through_handles() {
    unsafe {
        let (mut f, mut w, mut cf, mut r) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        taubex_signal_parse(c("exp_step:beta=0.5").as_ptr(), &mut f);
        taubex_window_parse(c("gaussian").as_ptr(), &mut w);
        assert_eq!(taubex_comparison_parse(c("beta=0.5,L=const").as_ptr(), &mut cf), TaubexStatus::Ok);
        let st = taubex_tauber_run(f, w, cf, 10.0, 20.0, 0.5, &mut r);
        assert_eq!(st, TaubexStatus::Ok, "{}", last_error());
        let (mut re, mut im, mut ok) = (0.0, 0.0, false);
        assert_eq!(taubex_report_constant(r, &mut re, &mut im, &mut ok), TaubexStatus::Ok);
        assert!((re - 1.0).abs() < 0.01 && im.abs() < 1e-6 && ok);

        let mut json = ptr::null_mut();
        assert_eq!(taubex_report_json(r, &mut json), TaubexStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        taubex_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["j_table"].as_array().unwrap().len(), 7);

        let mut passed = false;
        assert_eq!(taubex_potter_check(cf, 0.1, 30.0, 0.25, &mut passed), TaubexStatus::Ok);
        assert!(passed);

        taubex_report_free(r);
        taubex_comparison_free(cf);
        taubex_window_free(w);
        taubex_signal_free(f);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(taubex_signal_parse(ptr::null(), &mut f), TaubexStatus::NullPointer);
        assert_eq!(taubex_signal_parse(c("nonsense:beta=1").as_ptr(), &mut f), TaubexStatus::ParseError);
        assert!(!last_error().is_empty());
        assert_eq!(taubex_signal_parse(c("exp:beta=3").as_ptr(), &mut f), TaubexStatus::Ok);
        assert!(last_error().is_empty());

        // sech decays too slowly to absorb e^{3t}; the bump has compact support
        let mut w = ptr::null_mut();
        taubex_window_parse(c("compact_bump").as_ptr(), &mut w);
        let mut slow = ptr::null_mut();
        taubex_window_parse(c("sech").as_ptr(), &mut slow);
        let mut m = ptr::null_mut();
        let st = taubex_stft(f, slow, -1.0, 1.0, 0.5, -1.0, 1.0, 0.5, 0.0, &mut m);
        assert_eq!(st, TaubexStatus::DecayDeficit, "{}", last_error());
        assert!(m.is_null());
        assert_eq!(taubex_stft(f, w, -1.0, 1.0, 0.5, -1.0, 1.0, 0.5, 0.0, &mut m), TaubexStatus::Ok);
        assert_eq!(taubex_stft(f, w, 1.0, -1.0, 0.5, -1.0, 1.0, 0.5, 0.0, &mut m), TaubexStatus::InvalidArgument);

        let re = [1.0, 2.0, 3.0];
        let mut s = ptr::null_mut();
        assert_eq!(taubex_signal_sampled(0.0, 0.5, 3, re.as_ptr(), ptr::null(), &mut s), TaubexStatus::Ok);
        taubex_signal_free(s);
        taubex_tf_free(m);
        taubex_signal_free(ptr::null_mut());
        taubex_window_free(slow);
        taubex_window_free(w);
        taubex_signal_free(f);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/taubex.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["taubex_stft", "taubex_tauber_run", "TAUBEX_STATUS_DECAY_DEFICIT", "typedef struct TaubexReport"] {
        assert!(text.contains(name), "{name}");
    }
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
