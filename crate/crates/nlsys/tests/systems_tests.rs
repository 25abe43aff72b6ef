//! Random-sample invariants of the nonlinearity families and frozen values
//! for the structural-condition probes.

mod common;

use common::assert_rel;
use nlsys::systems::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample_families() -> Vec<(SystemSpec, f64)> {
    // (spec, upper sampling bound for u, v)
    vec![
        (SystemSpec::gelfand(), 3.0),
        (SystemSpec::lane_emden(2.0).unwrap(), 3.0),
        (SystemSpec::lane_emden(7.5).unwrap(), 3.0),
        (SystemSpec::mems(2.0).unwrap(), 0.999),
        (SystemSpec::gradient_powers(3.0, 2.5).unwrap(), 3.0),
        (
            SystemSpec::gradient(ScalarProfile::Exponential, ScalarProfile::Exponential)
                .unwrap(),
            3.0,
        ),
    ]
}

#[test]
fn cross_product_of_partials_nonnegative_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x73797374);
    for (spec, hi) in sample_families() {
        for _ in 0..10_000 {
            let u = rng.random_range(0.0..hi);
            let v = rng.random_range(0.0..hi);
            let e = spec.eval(u, v).unwrap();
            assert!(
                e.f_v * e.g_u >= 0.0,
                "negative coupling product for {:?} at ({u}, {v})",
                spec.family()
            );
        }
    }
}

#[test]
fn right_hand_sides_increase_in_each_variable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6f);
    for (spec, hi) in sample_families() {
        for _ in 0..2_000 {
            let u = rng.random_range(0.0..hi * 0.9);
            let v1 = rng.random_range(0.0..hi * 0.9);
            let v2 = rng.random_range(v1..hi);
            assert!(spec.eval(u, v2).unwrap().f >= spec.eval(u, v1).unwrap().f);
            assert!(spec.eval(v2, u).unwrap().g >= spec.eval(v1, u).unwrap().g);
            assert!(spec.eval(u, v1).unwrap().f > 0.0);
        }
    }
}

#[test]
fn gradient_family_is_a_gradient_system() {
    // dF/dv and dG/du must both equal f'(u) g'(v); with closed-form partials
    // the match is exact, well inside the 1e-12 budget.
    let mut rng = ChaCha8Rng::seed_from_u64(0x67726164);
    let specs = [
        SystemSpec::gradient_powers(3.0, 2.5).unwrap(),
        SystemSpec::gradient(ScalarProfile::Exponential, ScalarProfile::ShiftedPower { p: 4.0 })
            .unwrap(),
    ];
    for spec in specs {
        for _ in 0..1_000 {
            let u = rng.random_range(0.0..3.0);
            let v = rng.random_range(0.0..3.0);
            let e = spec.eval(u, v).unwrap();
            assert!((e.f_v - e.g_u).abs() <= 1e-12 * e.f_v.abs().max(1.0));
        }
    }
}

#[test]
fn condition_probe_frozen_constants() {
    // Exponential: every probe constant equals 1.
    let exp = ScalarProfile::Exponential;
    let probes = exp.default_probes();
    assert_rel(
        second_derivative_ratio_floor(exp, &probes).minimum.unwrap(),
        1.0,
        1e-12,
        "exponential ratio floor",
    );
    assert_rel(convexity_growth_ratio(exp, &probes), 1.0, 1e-12, "exponential growth ratio");

    // Shifted power: ratio floor (p-1)/(p-2), growth ratio (p-1)/p.
    for p in [3.0, 4.0, 10.0] {
        let f = ScalarProfile::ShiftedPower { p };
        let probes = f.default_probes();
        assert_rel(
            second_derivative_ratio_floor(f, &probes).minimum.unwrap(),
            (p - 1.0) / (p - 2.0),
            1e-10,
            &format!("shifted power ratio floor p={p}"),
        );
        assert_rel(
            convexity_growth_ratio(f, &probes),
            (p - 1.0) / p,
            1e-12,
            &format!("shifted power growth ratio p={p}"),
        );
    }

    // Singular power: growth ratio (p+1)/p.
    for p in [2.0, 3.0] {
        let f = ScalarProfile::SingularPower { p };
        let probes = f.default_probes();
        assert_rel(
            convexity_growth_ratio(f, &probes),
            (p + 1.0) / p,
            1e-9,
            &format!("singular power growth ratio p={p}"),
        );
    }

    // Degenerate and failing profiles.
    let quad = ScalarProfile::Quadratic;
    let r = second_derivative_ratio_floor(quad, &quad.default_probes());
    assert!(r.degenerate && r.minimum.is_none());
    let affine = ScalarProfile::Affine;
    assert!(!check_superlinearity(affine, &affine.default_probes()).pass);
}

#[test]
fn superlinearity_proxy_across_profiles() {
    for f in [
        ScalarProfile::Exponential,
        ScalarProfile::ShiftedPower { p: 3.0 },
        ScalarProfile::ShiftedPower { p: 1.5 },
    ] {
        assert!(check_superlinearity(f, &f.default_probes()).pass, "{f:?} should pass");
    }
    // The singular profile is superlinear toward its endpoint; the proxy
    // measures growth against the probe value, which stays below 1.
    let sp = ScalarProfile::SingularPower { p: 2.0 };
    assert!(check_superlinearity(sp, &sp.default_probes()).pass);
}
