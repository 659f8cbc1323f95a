use std::ffi::CStr;
use std::ptr;

use longwave_ffi::*;

fn bank(variant: LwVariant) -> *mut LwBank {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { lw_bank_new(variant, 4, 4, &mut b) }, LwStatus::Ok);
    assert!(!b.is_null());
    b
}

fn last_error() -> String {
    let p = lw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn bank_lifecycle_and_queries() {
    let b = bank(LwVariant::CfwC);
    let mut len = 0usize;
    assert_eq!(unsafe { lw_bank_support_length(b, &mut len) }, LwStatus::Ok);
    assert_eq!(len, 9);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { lw_bank_psi_hat(b, 0.0, &mut re, &mut im) }, LwStatus::Ok);
    assert_eq!((re, im), (0.0, 0.0));

    let mut k = 0.0;
    assert_eq!(unsafe { lw_bank_k(b, 0.4, &mut k) }, LwStatus::Ok);
    assert!(k > 0.0 && k.is_finite());
    assert_eq!(unsafe { lw_bank_k(b, 100.0, &mut k) }, LwStatus::InvalidArgument);
    assert!(last_error().contains("strip"));
    unsafe { lw_bank_free(b) };
    unsafe { lw_bank_free(ptr::null_mut()) };
}

#[test]
fn invalid_bank_parameters_are_reported() {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { lw_bank_new(LwVariant::CfwC, 0, 4, &mut b) }, LwStatus::InvalidArgument);
    assert!(b.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { lw_bank_new(LwVariant::CfwC, 4, 4, ptr::null_mut()) }, LwStatus::NullPointer);
}

#[test]
fn simulate_and_estimate_round_trip() {
    let (n, p) = (4096usize, 2usize);
    let d = [0.2, 0.4];
    let sigma = [1.0, 0.5, 0.5, 1.0];
    let mut x = vec![0.0; n * p];
    let st = unsafe { lw_simulate_arfima(n, p, d.as_ptr(), sigma.as_ptr(), 3, x.as_mut_ptr(), x.len()) };
    assert_eq!(st, LwStatus::Ok);

    let b = bank(LwVariant::CfwC);
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { lw_estimate(b, x.as_ptr(), n, p, 4, 0, &mut fit) }, LwStatus::Ok);
    assert_eq!(unsafe { lw_fit_dim(fit) }, 2);

    let mut dh = [0.0; 2];
    assert_eq!(unsafe { lw_fit_d(fit, dh.as_mut_ptr(), 2) }, LwStatus::Ok);
    assert!((dh[0] - 0.2).abs() < 0.15 && (dh[1] - 0.4).abs() < 0.15, "{dh:?}");

    let mut rho = [0.0; 4];
    assert_eq!(unsafe { lw_fit_matrix(fit, LwMatrix::Rho, rho.as_mut_ptr(), 4) }, LwStatus::Ok);
    assert_eq!(rho[0], 1.0);
    assert_eq!(rho[1], rho[2]);
    let mut small = [0.0; 3];
    assert_eq!(unsafe { lw_fit_matrix(fit, LwMatrix::Phi, small.as_mut_ptr(), 3) }, LwStatus::BufferTooSmall);

    unsafe { lw_fit_free(fit) };
    unsafe { lw_bank_free(b) };
}

#[test]
fn short_input_maps_to_its_own_code() {
    let b = bank(LwVariant::CfwC);
    let x = vec![0.5; 32];
    let mut fit = ptr::null_mut();
    assert_eq!(unsafe { lw_estimate(b, x.as_ptr(), 32, 1, 4, 0, &mut fit) }, LwStatus::InputTooShort);
    assert!(fit.is_null());
    unsafe { lw_bank_free(b) };
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(lw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/longwave.h")).unwrap();
    for name in ["lw_bank_new", "lw_bank_free", "lw_estimate", "lw_fit_free", "lw_fit_matrix", "typedef struct LwFit LwFit"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
