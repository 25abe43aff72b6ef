//! Kernel constants and exterior-mass integrals against frozen references
//! and an independent adaptive-quadrature oracle.

mod common;

use common::assert_rel;
use nlsys::kernel::*;
use nlsys::quad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// 25-digit references for the Fourier-symbol normalization constant.
const FRAC_LAP_CONSTANTS: [(f64, f64, f64); 6] = [
    (1.0, 0.5, 0.3183098861837906715377675),
    (1.0, 0.3, 0.2300963816816321046480517),
    (1.0, 0.25, 0.199471140200716338969973),
    (1.0, 0.7, 0.319881098667347840164256),
    (2.0, 0.5, 0.1591549430918953357688838),
    (3.0, 0.75, 0.1190505673767018183483062),
];

#[test]
fn normalization_constant_reference_values() {
    for (n, s, want) in FRAC_LAP_CONSTANTS {
        let got = frac_lap_constant(n, s).unwrap();
        assert_rel(got, want, 1e-13, &format!("c({n}, {s})"));
    }
    // n=1, s=0.5 is 1/pi in closed form.
    assert_rel(
        frac_lap_constant(1.0, 0.5).unwrap(),
        std::f64::consts::FRAC_1_PI,
        1e-14,
        "c(1, 1/2) = 1/pi",
    );
}

#[test]
fn normalization_constant_vanishes_with_order() {
    let mut prev = frac_lap_constant(1.0, 0.2).unwrap();
    for s in [0.1, 0.05, 0.01, 0.001] {
        let c = frac_lap_constant(1.0, s).unwrap();
        assert!(c < prev, "c(1, {s}) = {c} should shrink toward 0");
        prev = c;
    }
    assert!(prev < 2e-3);
    assert!(frac_lap_constant(0.5, 0.5).is_err());
    assert!(frac_lap_constant(1.0, 1.0).is_err());
}

#[test]
fn ellipticity_isotropic_and_atom_pair() {
    for s in [0.2, 0.5, 0.8] {
        let k = SpectralKernel::weighted_even(s, 1.0).unwrap();
        let cert = check_ellipticity(&k).unwrap();
        assert_rel(cert.c1, 2.0, 1e-12, "isotropic lower constant");
        assert_rel(cert.c2, 1.0, 1e-15, "isotropic upper bound");
    }
    let k = SpectralKernel::weighted_even(0.4, 0.31).unwrap();
    let cert = check_ellipticity(&k).unwrap();
    assert_rel(cert.c1, 0.62, 1e-12, "atom-pair lower constant");
    assert_rel(cert.c2, 0.31, 1e-15, "atom-pair upper bound");
}

#[test]
fn kernel_scaling_law_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65726e);
    for _ in 0..200 {
        let s = rng.random_range(0.05..0.95);
        let k = SpectralKernel::fractional_laplacian(s).unwrap();
        let y = rng.random_range(0.01..10.0_f64);
        let t = rng.random_range(0.1..10.0_f64);
        let lhs = k.eval(t * y);
        let rhs = t.powf(-(1.0 + 2.0 * s)) * k.eval(y);
        assert_rel(lhs, rhs, 1e-12, &format!("scaling at s={s}, y={y}, t={t}"));
    }
}

#[test]
fn exterior_mass_closed_form_vs_quadrature() {
    // The closed form must match brute-force integration of J over the
    // exterior. The improper tails are mapped to finite intervals by the
    // substitution z = R_far * w / (1 - w) ... instead we integrate out to a
    // far cutoff and add the exact power-law remainder, which is how the
    // oracle that froze these values was built.
    let mut rng = ChaCha8Rng::seed_from_u64(0x65787465);
    let r = 1.0;
    for trial in 0..100 {
        let s: f64 = rng.random_range(0.1..0.9);
        let x: f64 = rng.random_range(-0.85..0.85);
        let k = SpectralKernel::fractional_laplacian(s).unwrap();
        let closed = exterior_mass(&k, x, r).unwrap();
        let far = 1e5;
        let left = quad::integrate(|z| k.eval(x - z), -far, -r, 0.0, 1e-12).unwrap().value;
        let right = quad::integrate(|z| k.eval(x - z), r, far, 0.0, 1e-12).unwrap().value;
        // Beyond the cutoff the integrand is c*|x-z|^{-1-2s} with |x-z| large:
        // remainder = c [(far-x)^{-2s} + (far+x)^{-2s}]/(2s).
        let c = k.one_sided_weight();
        let tail = c * ((far - x).powf(-2.0 * s) + (far + x).powf(-2.0 * s)) / (2.0 * s);
        assert_rel(
            left + right + tail,
            closed,
            1e-10,
            &format!("exterior mass trial {trial} (s={s}, x={x})"),
        );
    }
}

#[test]
fn exterior_mass_frozen_value() {
    // Unit one-sided weight, s = 1/2, x = 1/2, R = 1: 1/(1/2) + 1/(3/2) = 8/3.
    let k = SpectralKernel::with_normalization(0.5, 1.0, 1.0).unwrap();
    let m = exterior_mass(&k, 0.5, 1.0).unwrap();
    assert_rel(m, 2.666666666666666666666667, 1e-14, "exterior mass closed form");
}

#[test]
fn exterior_mass_symmetry_and_divergence() {
    let k = SpectralKernel::fractional_laplacian(0.35).unwrap();
    for x in [0.0, 0.3, 0.65] {
        let a = exterior_mass(&k, x, 1.0).unwrap();
        let b = exterior_mass(&k, -x, 1.0).unwrap();
        assert_rel(a, b, 1e-15, "exterior mass evenness in x");
    }
    // Monotone divergence toward the boundary.
    let near = exterior_mass(&k, 0.999, 1.0).unwrap();
    let nearer = exterior_mass(&k, 0.999999, 1.0).unwrap();
    assert!(nearer > near && near > exterior_mass(&k, 0.9, 1.0).unwrap());
    assert!(exterior_mass(&k, 1.0 - 1e-16, 1.0).is_ok());
    assert!(exterior_mass(&k, 1.0, 1.0).is_err());
}
