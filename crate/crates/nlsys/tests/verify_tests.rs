//! End-to-end checks of the inequality machinery on states produced by the
//! solver itself: every derived estimate must hold on every stable record a
//! continuation run emits, not just on hand-picked profiles.

mod common;

use common::assert_rel;
use nlsys::discretize::{assemble, DiscreteOperator, Grid, SingularRule};
use nlsys::kernel::SpectralKernel;
use nlsys::solve::{continue_branch, Branch, SolveContext, SolverSettings, StepPolicy};
use nlsys::systems::{RayParams, SystemSpec};
use nlsys::verify::{
    check_corollary_inequality, check_integral_estimates, corollary_bank,
    elementary_inequalities, EstimateReport,
};

fn operator(n: usize, s: f64) -> DiscreteOperator {
    let kernel = SpectralKernel::fractional_laplacian(s).unwrap();
    let grid = Grid::uniform(n, 1.0).unwrap();
    assemble(&kernel, &grid, SingularRule::CellExact).unwrap()
}

fn short_branch(op: &DiscreteOperator, sys: &SystemSpec, sigma: f64) -> Branch {
    let settings = SolverSettings::for_system(sys);
    let policy = StepPolicy::default();
    continue_branch(op, sys, sigma, &policy, &settings).unwrap()
}

fn assert_all_pass(reports: &[EstimateReport], context: &str) {
    for r in reports {
        assert!(
            r.pass,
            "{context}: {} failed with lhs {:.6e} rhs {:.6e} slack {:.3e}",
            r.name, r.lhs, r.rhs, r.slack
        );
    }
}

#[test]
fn bank_holds_along_a_computed_branch() {
    let op = operator(64, 0.5);
    let sys = SystemSpec::gelfand();
    let branch = short_branch(&op, &sys, 1.0);
    assert!(branch.records.len() >= 5);
    let picks = [0, branch.records.len() / 2, branch.records.len() - 1];
    for &i in &picks {
        let rec = &branch.records[i];
        let bank = corollary_bank(&op, &sys, &rec.u, &rec.v).unwrap();
        let reports =
            check_corollary_inequality(&op, &sys, rec.lambda, rec.gamma, &rec.u, &rec.v, &bank)
                .unwrap();
        assert_all_pass(&reports, &format!("record {i}"));
        // The branch-driven profiles must have honest room, not borderline
        // rounding-level slack.
        let proof = reports
            .iter()
            .find(|r| r.name == "coupling-bound:branch-exp-half")
            .unwrap();
        assert!(
            proof.slack > 1e-12 * proof.rhs.abs(),
            "record {i}: slack {:.3e}",
            proof.slack
        );
    }
}

#[test]
fn pair_bank_holds_off_the_symmetric_ray() {
    let op = operator(48, 0.6);
    let sys = SystemSpec::gradient_powers(2.0, 3.0).unwrap();
    let branch = short_branch(&op, &sys, 2.0);
    let rec = branch.records.last().unwrap();
    let bank = corollary_bank(&op, &sys, &rec.u, &rec.v).unwrap();
    assert!(bank.iter().any(|e| e.eta.is_some()));
    let reports =
        check_corollary_inequality(&op, &sys, rec.lambda, rec.gamma, &rec.u, &rec.v, &bank)
            .unwrap();
    assert_all_pass(&reports, "gradient record");
}

#[test]
fn exponential_estimates_hold_with_matched_moments() {
    let op = operator(64, 0.5);
    let sys = SystemSpec::gelfand();
    let branch = short_branch(&op, &sys, 1.0);
    for &i in &[0, branch.records.len() - 1] {
        let rec = &branch.records[i];
        let reports =
            check_integral_estimates(&op, &sys, rec.lambda, rec.gamma, &rec.u, &rec.v, 1.0)
                .unwrap();
        assert_all_pass(&reports, &format!("record {i}"));
        // On the diagonal ray the two cross moments coincide.
        let holder = reports
            .iter()
            .find(|r| r.name == "cross-moment-holder-step")
            .unwrap();
        let x = holder.quantities["moment-x"];
        let y = holder.quantities["moment-y"];
        assert_rel(x, y, 1e-10, "cross moments on the diagonal ray");
    }
}

#[test]
fn power_estimates_hold_at_half_the_endpoint() {
    let op = operator(56, 0.5);
    let sys = SystemSpec::lane_emden(2.0).unwrap();
    let branch = short_branch(&op, &sys, 1.0);
    let ctx = SolveContext::new(&op, &sys).unwrap();
    let settings = SolverSettings::for_system(&sys);
    let params = RayParams::new(1.0, 0.5 * branch.lambda_star()).unwrap();
    let sol = ctx.minimal_solution(&params, None, &settings).unwrap();
    let reports =
        check_integral_estimates(&op, &sys, params.lambda(), params.gamma(), &sol.u, &sol.v, 1.5)
            .unwrap();
    assert_all_pass(&reports, "power state");
    let relation = reports
        .iter()
        .find(|r| r.name == "cross-moment-relation-x")
        .unwrap();
    assert!(relation.slack > 0.0);
    assert!(relation.quantities.contains_key("epsilon"));
}

#[test]
fn singular_estimates_hold_at_half_the_endpoint() {
    let op = operator(56, 0.5);
    let sys = SystemSpec::mems(2.0).unwrap();
    let branch = short_branch(&op, &sys, 1.0);
    let ctx = SolveContext::new(&op, &sys).unwrap();
    let settings = SolverSettings::for_system(&sys);
    let params = RayParams::new(1.0, 0.5 * branch.lambda_star()).unwrap();
    let sol = ctx.minimal_solution(&params, None, &settings).unwrap();
    // t = 1.5 sits exactly on the moment-exponent floor 2t = p + 1.
    let reports =
        check_integral_estimates(&op, &sys, params.lambda(), params.gamma(), &sol.u, &sol.v, 1.5)
            .unwrap();
    assert_all_pass(&reports, "singular state");
}

#[test]
fn gradient_curvature_chain_holds() {
    let op = operator(48, 0.5);
    let sys = SystemSpec::gradient_powers(2.0, 2.0).unwrap();
    let branch = short_branch(&op, &sys, 1.0);
    let ctx = SolveContext::new(&op, &sys).unwrap();
    let settings = SolverSettings::for_system(&sys);
    let params = RayParams::new(1.0, 0.5 * branch.lambda_star()).unwrap();
    let sol = ctx.minimal_solution(&params, None, &settings).unwrap();
    let reports =
        check_integral_estimates(&op, &sys, params.lambda(), params.gamma(), &sol.u, &sol.v, 2.0)
            .unwrap();
    assert_all_pass(&reports, "gradient state");
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    assert!(names.contains(&"curvature-mass-bound"));
    assert!(names.contains(&"derivative-product-mass"));
}

#[test]
fn product_mass_is_stable_under_refinement() {
    let sys = SystemSpec::gelfand();
    let coarse = operator(64, 0.5);
    let branch = short_branch(&coarse, &sys, 1.0);
    let lambda = 0.5 * branch.lambda_star();
    let params = RayParams::new(1.0, lambda).unwrap();
    let settings = SolverSettings::for_system(&sys);
    let mut masses = Vec::new();
    for n in [64usize, 128] {
        let op = operator(n, 0.5);
        let ctx = SolveContext::new(&op, &sys).unwrap();
        let sol = ctx.minimal_solution(&params, None, &settings).unwrap();
        let reports =
            check_integral_estimates(&op, &sys, lambda, lambda, &sol.u, &sol.v, 1.0).unwrap();
        let mass = reports
            .iter()
            .find(|r| r.name == "product-mass")
            .unwrap()
            .lhs;
        masses.push(mass);
    }
    assert_rel(masses[1], masses[0], 2e-2, "refined product mass");
}

#[test]
fn elementary_full_sample_has_zero_violations() {
    let reports = elementary_inequalities(100_000, 2026);
    assert_eq!(reports.len(), 5);
    for r in &reports {
        assert_eq!(r.samples, 100_000);
        assert_eq!(
            r.violations, 0,
            "{}: worst slack {:.3e}, witness {:?}",
            r.name, r.worst_slack, r.witness
        );
    }
}
