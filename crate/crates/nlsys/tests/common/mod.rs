//! Assertion helpers shared by the integration suites.
#![allow(dead_code)]

/// Relative comparison with an absolute floor: passes when
/// |actual - expected| <= tol * max(|expected|, 1).
pub fn assert_rel(actual: f64, expected: f64, tol: f64, what: &str) {
    let scale = expected.abs().max(1.0);
    let err = (actual - expected).abs();
    assert!(
        err <= tol * scale,
        "{what}: got {actual:.17e}, want {expected:.17e} (err {err:.3e} > {tol:.1e} * {scale:.3e})"
    );
}

/// Plain absolute comparison.
pub fn assert_abs(actual: f64, expected: f64, tol: f64, what: &str) {
    let err = (actual - expected).abs();
    assert!(
        err <= tol,
        "{what}: got {actual:.17e}, want {expected:.17e} (err {err:.3e} > {tol:.1e})"
    );
}
