//! C ABI for `bdg-lab`.
//!
//! Every fallible function returns a [`BdgStatus`]; on failure the message is
//! available from [`bdg_last_error_message`] on the same thread. Objects are
//! handed out as opaque pointers and must be released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bdg_lab::sim::{moment_estimates, simulate_batch_with_threads, z_ratio, PathSample, SimConfig};
use bdg_lab::{hermite_coeffs, proved_constants, BoundsResult, Error, Parity};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidOrder = 3,
    Numerical = 4,
    Config = 5,
    Panic = 6,
}

/// Proved and sharp constants for one order.
pub struct BdgBounds(BoundsResult);

/// A simulated batch of `(si, qv)` path samples.
pub struct BdgBatch {
    n: u32,
    samples: Vec<PathSample>,
}

/// Plain copy of the values held by a [`BdgBounds`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BdgConstants {
    pub n: u32,
    /// 1 for odd orders, 0 for even.
    pub odd: u8,
    pub d1: f64,
    pub d2: f64,
    pub c1_proved: f64,
    pub c2_proved: f64,
    pub c1_sharp: f64,
    pub c2_sharp: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BdgMoments {
    pub n: u32,
    pub m2n: f64,
    pub m2n_stderr: f64,
    pub qn: f64,
    pub qn_stderr: f64,
    /// `E|S|^{2n} / E[Q^n]`.
    pub z_pow_n: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> BdgStatus {
    match err {
        Error::InvalidOrder { .. } | Error::OrderMismatch { .. } => BdgStatus::InvalidOrder,
        Error::Config(_) => BdgStatus::Config,
        Error::InvalidInput(_) | Error::Precondition(_) | Error::ZeroPolynomial | Error::NotSquarefree { .. } => {
            BdgStatus::InvalidArgument
        }
        Error::EndpointRoot { .. } | Error::NoPositiveRoots | Error::DegenerateDenominator => BdgStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BdgStatus, String)>) -> BdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BdgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BdgStatus::Panic
        }
    }
}

fn lift(err: Error) -> (BdgStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (BdgStatus, String) {
    (BdgStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bdg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Computes the constants for order `n` with enclosure width `tol`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bdg_bounds_compute(n: u32, tol: f64, out: *mut *mut BdgBounds) -> BdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = proved_constants(n, tol).map_err(lift)?;
        *out = Box::into_raw(Box::new(BdgBounds(r)));
        Ok(())
    })
}

/// # Safety
/// `bounds` must come from [`bdg_bounds_compute`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bdg_bounds_get(bounds: *const BdgBounds, out: *mut BdgConstants) -> BdgStatus {
    guard(|| {
        let b = bounds.as_ref().ok_or_else(|| null("bounds"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = &b.0;
        *out = BdgConstants {
            n: r.n,
            odd: u8::from(r.parity == Parity::Odd),
            d1: r.d1,
            d2: r.d2,
            c1_proved: r.c1_proved,
            c2_proved: r.c2_proved,
            c1_sharp: r.c1_sharp,
            c2_sharp: r.c2_sharp,
        };
        Ok(())
    })
}

/// # Safety
/// `bounds` must be null or come from [`bdg_bounds_compute`], and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bdg_bounds_free(bounds: *mut BdgBounds) {
    if !bounds.is_null() {
        drop(Box::from_raw(bounds));
    }
}

/// Writes the coefficient `a_k` of `H_{2n}` as an exact `"p/q"` string.
/// Release it with [`bdg_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bdg_hermite_coefficient(n: u32, k: u32, out: *mut *mut c_char) -> BdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let h = hermite_coeffs(n).map_err(lift)?;
        if k > n {
            return Err((BdgStatus::InvalidArgument, format!("k = {k} exceeds n = {n}")));
        }
        let s = h.coeff(k as usize).to_string();
        *out = CString::new(s).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bdg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Simulates a batch described by a JSON configuration with fields `t`,
/// `steps`, `paths`, `seed`, `n`, `integrand` and `driver`. `threads = 0`
/// uses the default pool. Results do not depend on `threads`.
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bdg_simulate_json(config_json: *const c_char, threads: usize, out: *mut *mut BdgBatch) -> BdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| (BdgStatus::InvalidArgument, format!("config is not UTF-8: {e}")))?;
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| (BdgStatus::Config, format!("invalid configuration: {e}")))?;
        let samples = if threads == 0 {
            bdg_lab::simulate_batch(&config)
        } else {
            simulate_batch_with_threads(&config, threads)
        }
        .map_err(lift)?;
        *out = Box::into_raw(Box::new(BdgBatch { n: config.n, samples }));
        Ok(())
    })
}

/// Number of paths in the batch, or 0 for a null handle.
///
/// # Safety
/// `batch` must be null or come from [`bdg_simulate_json`].
#[no_mangle]
pub unsafe extern "C" fn bdg_batch_len(batch: *const BdgBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.samples.len())
}

/// Moment estimates of order `n`; `n = 0` uses the order from the config.
///
/// # Safety
/// `batch` must come from [`bdg_simulate_json`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bdg_batch_moments(batch: *const BdgBatch, n: u32, out: *mut BdgMoments) -> BdgStatus {
    guard(|| {
        let b = batch.as_ref().ok_or_else(|| null("batch"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let n = if n == 0 { b.n } else { n };
        let m = moment_estimates(&b.samples, n).map_err(lift)?;
        z_ratio(&m.m2n, &m.qn, n).map_err(lift)?;
        *out = BdgMoments {
            n,
            m2n: m.m2n.value,
            m2n_stderr: m.m2n.stderr,
            qn: m.qn.value,
            qn_stderr: m.qn.stderr,
            z_pow_n: m.m2n.value / m.qn.value,
        };
        Ok(())
    })
}

/// # Safety
/// `batch` must be null or come from [`bdg_simulate_json`], and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bdg_batch_free(batch: *mut BdgBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}
