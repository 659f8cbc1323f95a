//! C ABI for `longwave`.
//!
//! Filter banks and fits are exposed as opaque handles created by
//! `lw_*_new`/`lw_estimate` and released with the matching `*_free`. Every
//! fallible call returns an [`LwStatus`]; the message of the last failure on
//! the calling thread is available through [`lw_last_error`]. Matrices are
//! passed row-major. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use longwave::filters::ComplexFilterBank;
use longwave::simulate::sim_arfima0d0;
use longwave::whittle::{estimate_with_bank, k_delta, WhittleConfig, WhittleFit};
use longwave::{Error, Variant};
use nalgebra::DMatrix;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InputTooShort = 3,
    NonFiniteInput = 4,
    BufferTooSmall = 5,
    /// Optimizer, factorization or other numerical failure.
    Numerical = 6,
    Panic = 7,
}

/// Filter family selector for [`lw_bank_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwVariant {
    CfwC = 0,
    CfwPr = 1,
    Daubechies = 2,
}

impl From<LwVariant> for Variant {
    fn from(v: LwVariant) -> Self {
        match v {
            LwVariant::CfwC => Variant::CfwC,
            LwVariant::CfwPr => Variant::CfwPr,
            LwVariant::Daubechies => Variant::Daubechies,
        }
    }
}

/// Opaque filter bank.
pub struct LwBank(ComplexFilterBank);

/// Opaque estimation result.
pub struct LwFit(WhittleFit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LwStatus {
    match e {
        Error::InputTooShort { .. } | Error::EmptyScales { .. } | Error::EmptyPyramid => LwStatus::InputTooShort,
        Error::NonFiniteInput { .. } => LwStatus::NonFiniteInput,
        e if e.is_numerical() => LwStatus::Numerical,
        _ => LwStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (LwStatus, String)>) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LwStatus::Panic
        }
    }
}

fn lift(e: Error) -> (LwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (LwStatus, String) {
    (LwStatus::NullPointer, format!("{what} is null"))
}

/// Pointer to the NUL-terminated message of the last failure on this
/// thread, or null. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a filter bank with `m` vanishing moments and analyticity order `l`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lw_bank_new(variant: LwVariant, m: usize, l: usize, out: *mut *mut LwBank) -> LwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let bank = ComplexFilterBank::new(variant.into(), m, l).map_err(lift)?;
        *out = Box::into_raw(Box::new(LwBank(bank)));
        Ok(())
    })
}

/// Releases a bank. Null is ignored.
///
/// # Safety
/// `bank` must come from [`lw_bank_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lw_bank_free(bank: *mut LwBank) {
    if !bank.is_null() {
        drop(Box::from_raw(bank));
    }
}

/// Tap count of each of the four filters.
///
/// # Safety
/// `bank` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_bank_support_length(bank: *const LwBank, out: *mut usize) -> LwStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = bank.0.support_length;
        Ok(())
    })
}

/// `ψ̂(λ) = ψ̂_h(λ) + i ψ̂_g(λ)`.
///
/// # Safety
/// `bank` must be a live handle; `re` and `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn lw_bank_psi_hat(bank: *const LwBank, lambda: f64, re: *mut f64, im: *mut f64) -> LwStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let z = bank.0.psi_hat(lambda);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Scale normalization constant `K(δ)`.
///
/// # Safety
/// `bank` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_bank_k(bank: *const LwBank, delta: f64, out: *mut f64) -> LwStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = k_delta(delta, &bank.0).map_err(lift)?;
        Ok(())
    })
}

/// Fits the `n × p` row-major sample `data` on scales `j0..=j1`; `j1 = 0`
/// selects the deepest usable scale.
///
/// # Safety
/// `bank` must be a live handle, `data` valid for `n·p` reads and `out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn lw_estimate(
    bank: *const LwBank,
    data: *const f64,
    n: usize,
    p: usize,
    j0: usize,
    j1: usize,
    out: *mut *mut LwFit,
) -> LwStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        if data.is_null() {
            return Err(null("data"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if p == 0 {
            return Err((LwStatus::InvalidArgument, "p must be positive".into()));
        }
        let len = n.checked_mul(p).ok_or((LwStatus::InvalidArgument, "n·p overflows".into()))?;
        let x = DMatrix::from_row_slice(n, p, std::slice::from_raw_parts(data, len));
        let b = &bank.0;
        let mut cfg =
            WhittleConfig { j0, j1: (j1 > 0).then_some(j1), m: b.m, l: b.l, variant: b.variant, ..Default::default() };
        cfg.d_max = cfg.d_max.min(b.m as f64 - 0.51);
        let fit = estimate_with_bank(&x, &cfg, b).map_err(lift)?;
        *out = Box::into_raw(Box::new(LwFit(fit)));
        Ok(())
    })
}

/// Releases a fit. Null is ignored.
///
/// # Safety
/// `fit` must come from [`lw_estimate`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lw_fit_free(fit: *mut LwFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Number of channels of a fit, or 0 for null.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lw_fit_dim(fit: *const LwFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.d_hat.len())
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), (LwStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < src.len() {
        return Err((LwStatus::BufferTooSmall, format!("buffer holds {len} values, {} needed", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// Which `p × p` matrix [`lw_fit_matrix`] copies.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwMatrix {
    Omega = 0,
    Phi = 1,
    Rho = 2,
}

/// Copies `d̂` into `out` (at least `p` values).
///
/// # Safety
/// `fit` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lw_fit_d(fit: *const LwFit, out: *mut f64, len: usize) -> LwStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(|| null("fit"))?;
        copy_out(&fit.0.d_hat, out, len)
    })
}

/// Copies `Ω̂`, `φ̂` or `ρ̂` row-major into `out` (at least `p²` values).
///
/// # Safety
/// `fit` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lw_fit_matrix(fit: *const LwFit, which: LwMatrix, out: *mut f64, len: usize) -> LwStatus {
    guard(|| {
        let fit = &fit.as_ref().ok_or_else(|| null("fit"))?.0;
        let m = match which {
            LwMatrix::Omega => &fit.omega_hat,
            LwMatrix::Phi => &fit.phi_hat,
            LwMatrix::Rho => &fit.rho_hat,
        };
        copy_out(&row_major(m), out, len)
    })
}

/// Simulates ARFIMA(0, d, 0) with innovation covariance `sigma` (`p × p`,
/// row-major) into `out` (`n × p`, row-major).
///
/// # Safety
/// `d` must be valid for `p` reads, `sigma` for `p²` reads and `out` for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn lw_simulate_arfima(
    n: usize,
    p: usize,
    d: *const f64,
    sigma: *const f64,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> LwStatus {
    guard(|| {
        if d.is_null() || sigma.is_null() {
            return Err(null("input"));
        }
        if p == 0 {
            return Err((LwStatus::InvalidArgument, "p must be positive".into()));
        }
        let d = std::slice::from_raw_parts(d, p);
        let s = DMatrix::from_row_slice(p, p, std::slice::from_raw_parts(sigma, p * p));
        let x = sim_arfima0d0(n, d, &s, seed).map_err(lift)?;
        copy_out(&row_major(&x), out, len)
    })
}
