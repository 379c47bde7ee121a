//! C ABI over `taubex`. Objects are opaque heap handles released with the
//! matching `*_free`; every fallible call returns a [`TaubexStatus`] and
//! leaves a message retrievable with [`taubex_last_error`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use taubex::cli::specs;
use taubex::modulation::{lpq_norm, MixedNormSpec, ModulationError};
use taubex::output::to_json;
use taubex::signal::{Grid, QuadratureSpec, SignalError, SignalSource, Window};
use taubex::slowvary::{potter_check, ComparisonFunction};
use taubex::stft::{forward_stft, StftError, TimeFrequencyMatrix};
use taubex::tauberian::{run_pipeline, AsymptoticReport, PipelineConfig, TauberianError};
use taubex::weights::TFWeight;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaubexStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    /// The window decays too slowly for the signal's growth.
    DecayDeficit = 4,
    NumericalError = 5,
    Panic = 6,
}

pub struct TaubexSignal(SignalSource);
pub struct TaubexWindow(Window);
pub struct TaubexComparison(ComparisonFunction);
pub struct TaubexTfMatrix(TimeFrequencyMatrix);
pub struct TaubexReport(AsymptoticReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

type Fallible<T> = Result<T, (TaubexStatus, String)>;

fn guard(f: impl FnOnce() -> Fallible<()>) -> TaubexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TaubexStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside taubex");
            TaubexStatus::Panic
        }
    }
}

fn null() -> (TaubexStatus, String) {
    (TaubexStatus::NullPointer, "null pointer argument".into())
}

fn stft_status(e: &StftError) -> TaubexStatus {
    match e {
        StftError::DecayDeficit { .. } => TaubexStatus::DecayDeficit,
        StftError::Signal(SignalError::Io(_)) => TaubexStatus::InvalidArgument,
        _ => TaubexStatus::NumericalError,
    }
}

fn from_stft(e: StftError) -> (TaubexStatus, String) {
    (stft_status(&e), e.to_string())
}

fn from_modulation(e: ModulationError) -> (TaubexStatus, String) {
    let status = match &e {
        ModulationError::InvalidExponent(_) => TaubexStatus::InvalidArgument,
        ModulationError::Stft(s) => stft_status(s),
        _ => TaubexStatus::NumericalError,
    };
    (status, e.to_string())
}

fn from_tauberian(e: TauberianError) -> (TaubexStatus, String) {
    let status = match &e {
        TauberianError::Stft(s) | TauberianError::Modulation(ModulationError::Stft(s)) => stft_status(s),
        TauberianError::NotPointwise(_) | TauberianError::InvalidParameter(_) | TauberianError::MissingDerivatives(_) => {
            TaubexStatus::InvalidArgument
        }
        _ => TaubexStatus::NumericalError,
    };
    (status, e.to_string())
}

unsafe fn text<'a>(p: *const c_char) -> Fallible<&'a str> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TaubexStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Fallible<&'a T> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Fallible<()> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

fn grid(lo: f64, hi: f64, step: f64) -> Fallible<Grid> {
    Grid::span(lo, hi, step).map_err(|e| (TaubexStatus::InvalidArgument, e.to_string()))
}

fn parsed<T>(r: Result<T, specs::SpecError>) -> Fallible<T> {
    r.map_err(|e| (TaubexStatus::ParseError, e.0))
}

/// Message for the most recent failing call on this thread; empty after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn taubex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from a `taubex_*` function returning an owned string, or be null.
#[no_mangle]
pub unsafe extern "C" fn taubex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

macro_rules! free_fn {
    ($name:ident, $ty:ty) => {
        /// # Safety
        /// The handle must come from this library and not be freed twice; null is ignored.
        #[no_mangle]
        pub unsafe extern "C" fn $name(h: *mut $ty) {
            if !h.is_null() {
                drop(Box::from_raw(h));
            }
        }
    };
}

free_fn!(taubex_signal_free, TaubexSignal);
free_fn!(taubex_window_free, TaubexWindow);
free_fn!(taubex_comparison_free, TaubexComparison);
free_fn!(taubex_tf_free, TaubexTfMatrix);
free_fn!(taubex_report_free, TaubexReport);

/// Builds a signal from a spec string such as `exp_step:beta=0.5` or a CSV path.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_signal_parse(spec: *const c_char, out: *mut *mut TaubexSignal) -> TaubexStatus {
    guard(|| {
        let s = parsed(specs::parse_signal(text(spec)?))?;
        put(out, Box::into_raw(Box::new(TaubexSignal(s))))
    })
}

/// Uniform samples `t0 + k step`, `k < len`, with real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to `len` doubles; `im` may be null for a real signal.
#[no_mangle]
pub unsafe extern "C" fn taubex_signal_sampled(
    t0: f64,
    step: f64,
    len: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut TaubexSignal,
) -> TaubexStatus {
    guard(|| {
        if re.is_null() {
            return Err(null());
        }
        let re = std::slice::from_raw_parts(re, len);
        let values: Vec<Complex64> = match im.is_null() {
            true => re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            false => re.iter().zip(std::slice::from_raw_parts(im, len)).map(|(&r, &i)| Complex64::new(r, i)).collect(),
        };
        let bad = |e: SignalError| (TaubexStatus::InvalidArgument, e.to_string());
        let g = Grid::new(t0, step, len).map_err(bad)?;
        let s = SignalSource::sampled(g, values).map_err(bad)?;
        put(out, Box::into_raw(Box::new(TaubexSignal(s))))
    })
}

/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_window_parse(spec: *const c_char, out: *mut *mut TaubexWindow) -> TaubexStatus {
    guard(|| {
        let w = parsed(specs::parse_window(text(spec)?))?;
        put(out, Box::into_raw(Box::new(TaubexWindow(w))))
    })
}

/// Parses `beta=..,L=..`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_comparison_parse(spec: *const c_char, out: *mut *mut TaubexComparison) -> TaubexStatus {
    guard(|| {
        let c = parsed(specs::parse_comparison(text(spec)?))?;
        put(out, Box::into_raw(Box::new(TaubexComparison(c))))
    })
}

/// Forward transform on `[x_lo, x_hi] x [xi_lo, xi_hi]` at imaginary offset `eta`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_stft(
    signal: *const TaubexSignal,
    window: *const TaubexWindow,
    x_lo: f64,
    x_hi: f64,
    x_step: f64,
    xi_lo: f64,
    xi_hi: f64,
    xi_step: f64,
    eta: f64,
    out: *mut *mut TaubexTfMatrix,
) -> TaubexStatus {
    guard(|| {
        let (f, psi) = (handle(signal)?, handle(window)?);
        let (xg, xig) = (grid(x_lo, x_hi, x_step)?, grid(xi_lo, xi_hi, xi_step)?);
        let m = forward_stft(&f.0, &psi.0, &xg, &xig, eta, &QuadratureSpec::default()).map_err(from_stft)?;
        put(out, Box::into_raw(Box::new(TaubexTfMatrix(m))))
    })
}

/// # Safety
/// `m` must be live; `nx` and `nxi` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_tf_dims(m: *const TaubexTfMatrix, nx: *mut usize, nxi: *mut usize) -> TaubexStatus {
    guard(|| {
        let (a, b) = handle(m)?.0.dims();
        put(nx, a)?;
        put(nxi, b)
    })
}

/// Copies the matrix row-major (`x` outer) into `re` and `im`, each of length `len`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn taubex_tf_values(
    m: *const TaubexTfMatrix,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> TaubexStatus {
    guard(|| {
        let v = handle(m)?.0.values();
        if re.is_null() || im.is_null() {
            return Err(null());
        }
        if len != v.len() {
            return Err((TaubexStatus::InvalidArgument, format!("buffer holds {len} values, matrix has {}", v.len())));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
        for (k, z) in v.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Weighted mixed `L^{p,q}` norm of a matrix; `weight` may be null for no weight.
/// Pass `INFINITY` for the max norm.
///
/// # Safety
/// `m` must be live, `weight` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_tf_norm(
    m: *const TaubexTfMatrix,
    p: f64,
    q: f64,
    weight: *const c_char,
    out: *mut f64,
) -> TaubexStatus {
    guard(|| {
        let m = handle(m)?;
        let w = if weight.is_null() { TFWeight::one() } else { parsed(specs::parse_weight(text(weight)?))? };
        let spec = MixedNormSpec::new(p, q, w).map_err(from_modulation)?;
        put(out, lpq_norm(&m.0, &spec).map_err(from_modulation)?)
    })
}

/// Potter bound check at `epsilon` over `|t|, |h| <= half_width` with the given step.
///
/// # Safety
/// `c` must be live and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_potter_check(
    c: *const TaubexComparison,
    epsilon: f64,
    half_width: f64,
    step: f64,
    passed: *mut bool,
) -> TaubexStatus {
    guard(|| {
        let c = handle(c)?;
        if !(epsilon > 0.0) {
            return Err((TaubexStatus::InvalidArgument, "epsilon must be positive".into()));
        }
        let g = grid(-half_width, half_width, step)?;
        put(passed, potter_check(&c.0, epsilon, &g, &g).passed())
    })
}

/// Runs the full constant-recovery pipeline with default settings except the
/// tail grid `[x_lo, x_hi]`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_tauber_run(
    signal: *const TaubexSignal,
    window: *const TaubexWindow,
    c: *const TaubexComparison,
    x_lo: f64,
    x_hi: f64,
    x_step: f64,
    out: *mut *mut TaubexReport,
) -> TaubexStatus {
    guard(|| {
        let (f, psi, c) = (handle(signal)?, handle(window)?, handle(c)?);
        let config = PipelineConfig { x_tail: grid(x_lo, x_hi, x_step)?, ..PipelineConfig::default() };
        let r = run_pipeline(&f.0, &psi.0, &c.0, &config).map_err(from_tauberian)?;
        put(out, Box::into_raw(Box::new(TaubexReport(r))))
    })
}

/// Recovered constant and whether every hypothesis check and limit succeeded.
///
/// # Safety
/// `r` must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_report_constant(
    r: *const TaubexReport,
    re: *mut f64,
    im: *mut f64,
    succeeded: *mut bool,
) -> TaubexStatus {
    guard(|| {
        let r = handle(r)?;
        put(re, r.0.c_hat.re)?;
        put(im, r.0.c_hat.im)?;
        put(succeeded, r.0.succeeded())
    })
}

/// Report as a JSON string; free with [`taubex_string_free`].
///
/// # Safety
/// `r` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taubex_report_json(r: *const TaubexReport, out: *mut *mut c_char) -> TaubexStatus {
    guard(|| {
        let json = to_json(&handle(r)?.0).map_err(|e| (TaubexStatus::NumericalError, e.to_string()))?;
        let s = CString::new(json).map_err(|e| (TaubexStatus::NumericalError, e.to_string()))?;
        put(out, s.into_raw())
    })
}
