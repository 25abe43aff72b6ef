//! Exercises the C surface exactly as a foreign caller would: through the
//! exported symbols, raw pointers, and status codes.

use nlsys_ffi::*;
use std::ptr;

fn classical_gelfand() -> f64 {
    10.0
}

#[test]
fn abi_version_is_stable() {
    assert_eq!(nls_abi_version(), NLS_ABI_VERSION);
    assert_eq!(NLS_ABI_VERSION, 1);
}

#[test]
fn threshold_calculators_agree_with_closed_forms() {
    let mut value = 0.0f64;
    unsafe {
        assert_eq!(nls_threshold_gelfand(1.0, &mut value), NlsStatus::Ok);
        assert_eq!(value, classical_gelfand());

        assert_eq!(nls_threshold_lane_emden(1.0, 2.0, &mut value), NlsStatus::Ok);
        let expected = 10.0 + 4.0 * 2.0f64.sqrt();
        assert!((value - expected).abs() <= 1e-12 * expected);

        assert_eq!(nls_threshold_mems(1.0, 2.0, &mut value), NlsStatus::Ok);
        let expected = 2.0 + 4.0 / 3.0 * (2.0 + 6.0f64.sqrt());
        assert!((value - expected).abs() <= 1e-12 * expected);

        assert_eq!(nls_threshold_gradient(0.5, 3.0, 3.0, &mut value), NlsStatus::Ok);
        assert!(value > 0.0);

        assert_eq!(nls_log_gamma(1.0, &mut value), NlsStatus::Ok);
        assert_eq!(value, 0.0);
    }
}

#[test]
fn domain_violations_come_back_as_status_codes() {
    let mut value = 0.0f64;
    unsafe {
        assert_eq!(nls_threshold_gelfand(0.0, &mut value), NlsStatus::Domain);
        assert_eq!(nls_threshold_lane_emden(0.5, 1.0, &mut value), NlsStatus::Domain);
        assert_eq!(nls_threshold_gradient(0.5, 2.0, 3.0, &mut value), NlsStatus::Domain);
        assert_eq!(nls_log_gamma(-3.0, &mut value), NlsStatus::Domain);
        assert_eq!(nls_singular_lambda(0.5, 0.5, &mut value), NlsStatus::Domain);
    }
}

#[test]
fn null_out_pointers_are_rejected_not_dereferenced() {
    unsafe {
        assert_eq!(nls_threshold_gelfand(0.5, ptr::null_mut()), NlsStatus::NullPointer);
        assert_eq!(
            nls_gelfand_criterion(7.0, 0.5, ptr::null_mut()),
            NlsStatus::NullPointer
        );
        let mut verdict = NlsBootstrapVerdict::Inconclusive;
        assert_eq!(
            nls_bootstrap_verdict(ptr::null(), &mut verdict),
            NlsStatus::NullPointer
        );
        assert_eq!(
            nls_bootstrap_new(1.5, 0.5, 3.0, 100, ptr::null_mut()),
            NlsStatus::NullPointer
        );
        nls_bootstrap_free(ptr::null_mut());
    }
}

#[test]
fn criteria_report_verdicts() {
    let mut verdict = NlsVerdict::Marginal;
    unsafe {
        assert_eq!(nls_gelfand_criterion(7.0, 0.5, &mut verdict), NlsStatus::Ok);
        assert_eq!(verdict, NlsVerdict::True);
        assert_eq!(nls_gelfand_criterion(50.0, 0.5, &mut verdict), NlsStatus::Ok);
        assert_eq!(verdict, NlsVerdict::False);
        assert_eq!(
            nls_lane_emden_criterion(8.0, 0.5, 2.0, &mut verdict),
            NlsStatus::Ok
        );
        assert_eq!(verdict, NlsVerdict::True);
        assert_eq!(
            nls_lane_emden_criterion(8.0, 0.5, 1.0, &mut verdict),
            NlsStatus::Domain
        );
    }
}

#[test]
fn singular_constants_match_the_library() {
    let mut lambda = 0.0f64;
    let mut amplitude = 0.0f64;
    unsafe {
        assert_eq!(nls_singular_lambda(1.0, 0.3, &mut lambda), NlsStatus::Ok);
        assert_eq!(
            nls_singular_amplitude(1.0, 0.3, 3.0, &mut amplitude),
            NlsStatus::Ok
        );
    }
    assert_eq!(lambda, nlsys::special::singular_lambda_gelfand(1.0, 0.3).unwrap());
    assert_eq!(
        amplitude,
        nlsys::special::singular_amplitude_lane_emden(1.0, 0.3, 3.0).unwrap()
    );
}

#[test]
fn embedding_exponent_covers_all_three_kinds() {
    let mut kind = NlsEmbedding::Unbounded;
    let mut q = -1.0f64;
    unsafe {
        assert_eq!(
            nls_embedding_exponent(2.0, 0.5, 1.0, &mut kind, &mut q),
            NlsStatus::Ok
        );
        assert_eq!(kind, NlsEmbedding::Finite);
        assert!((q - 2.0).abs() <= 1e-12, "q = nr/(n-2rs) = 2 here, got {q}");

        q = -1.0;
        assert_eq!(
            nls_embedding_exponent(2.0, 0.5, 2.0, &mut kind, &mut q),
            NlsStatus::Ok
        );
        assert_eq!(kind, NlsEmbedding::AnyFinite);
        assert_eq!(q, -1.0, "q slot untouched off the finite branch");

        assert_eq!(
            nls_embedding_exponent(2.0, 0.5, 4.0, &mut kind, &mut q),
            NlsStatus::Ok
        );
        assert_eq!(kind, NlsEmbedding::Unbounded);

        assert_eq!(
            nls_embedding_exponent(2.0, 0.5, 0.5, &mut kind, &mut q),
            NlsStatus::Domain
        );
    }
}

#[test]
fn bootstrap_handle_lifecycle_works_end_to_end() {
    unsafe {
        let mut handle: *mut NlsBootstrap = ptr::null_mut();
        assert_eq!(
            nls_bootstrap_from_embedding(1.5, 0.5, 1000, &mut handle),
            NlsStatus::Ok
        );
        assert!(!handle.is_null());

        let mut verdict = NlsBootstrapVerdict::Inconclusive;
        assert_eq!(nls_bootstrap_verdict(handle, &mut verdict), NlsStatus::Ok);
        assert_eq!(verdict, NlsBootstrapVerdict::Bounded, "n < 4s must bound");

        let mut count = 0usize;
        assert_eq!(nls_bootstrap_exponent_count(handle, &mut count), NlsStatus::Ok);
        assert!(count >= 1);

        let mut steps = 0usize;
        assert_eq!(nls_bootstrap_steps(handle, &mut steps), NlsStatus::Ok);
        assert!(steps >= 1);

        let mut first = 0.0f64;
        assert_eq!(nls_bootstrap_exponent(handle, 0, &mut first), NlsStatus::Ok);
        assert_eq!(first, 3.0, "embedding start n/(n-2s) = 3 at n=1.5, s=0.5");
        let mut last = 0.0f64;
        assert_eq!(
            nls_bootstrap_exponent(handle, count - 1, &mut last),
            NlsStatus::Ok
        );
        assert!(last > first);
        assert_eq!(
            nls_bootstrap_exponent(handle, count, &mut last),
            NlsStatus::Domain,
            "index past the end"
        );
        nls_bootstrap_free(handle);

        let mut stalled: *mut NlsBootstrap = ptr::null_mut();
        assert_eq!(
            nls_bootstrap_new(3.0, 0.5, 3.0, 200, &mut stalled),
            NlsStatus::Ok
        );
        assert_eq!(nls_bootstrap_verdict(stalled, &mut verdict), NlsStatus::Ok);
        assert_eq!(
            verdict,
            NlsBootstrapVerdict::Inconclusive,
            "n > 4s never escapes"
        );
        nls_bootstrap_free(stalled);

        let mut bad: *mut NlsBootstrap = ptr::null_mut();
        assert_eq!(
            nls_bootstrap_new(1.5, 1.5, 3.0, 100, &mut bad),
            NlsStatus::Domain
        );
        assert!(bad.is_null(), "handle slot untouched on failure");
    }
}

#[test]
fn generated_header_declares_the_full_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/nlsys.h"
    ))
    .expect("build script writes the header");
    for symbol in [
        "nls_abi_version",
        "nls_log_gamma",
        "nls_threshold_gelfand",
        "nls_threshold_lane_emden",
        "nls_threshold_mems",
        "nls_threshold_gradient",
        "nls_gelfand_criterion",
        "nls_lane_emden_criterion",
        "nls_singular_lambda",
        "nls_singular_amplitude",
        "nls_embedding_exponent",
        "nls_bootstrap_new",
        "nls_bootstrap_from_embedding",
        "nls_bootstrap_staged",
        "nls_bootstrap_verdict",
        "nls_bootstrap_steps",
        "nls_bootstrap_exponent_count",
        "nls_bootstrap_exponent",
        "nls_bootstrap_free",
        "NLS_STATUS_OK",
        "NLS_VERDICT_MARGINAL",
        "typedef struct NlsBootstrap NlsBootstrap;",
    ] {
        assert!(header.contains(symbol), "header lost {symbol}");
    }
}
