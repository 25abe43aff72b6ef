//! Minimal-solution computation and branch continuation along the ray
//! gamma = sigma * lambda. Each parameter point is solved by a monotone
//! fixed-point sweep from zero (or from the previous record) polished by
//! Newton's method; the continuation drives lambda upward with adaptive
//! steps until the solvable range is bracketed to a relative width below
//! the step floor, then the endpoint profile is extrapolated with a
//! square-root fit in the parameter gap.

use crate::discretize::{DiscreteOperator, GridFunction};
use crate::error::{Error, Result};
use crate::linalg::{smallest_eigenpair, LuSolver, SmallestEigen, SpdSolver};
use crate::systems::{RayParams, SystemFamily, SystemSpec};
use crate::verify::StabilityForm;
use nalgebra::{DMatrix, DVector};

/// Iteration controls for one minimal-solution solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    /// Sup-norm residual target for the Newton polish.
    pub tol: f64,
    /// Sup-norm increment at which the fixed-point sweep hands over to
    /// Newton.
    pub picard_tol: f64,
    pub max_picard: usize,
    pub max_newton: usize,
    /// Iterates above this sup-norm are declared divergent.
    pub sup_cap: f64,
    /// Keep-out margin below the admissible upper bound of singular
    /// families.
    pub box_margin: f64,
    /// Disable the u = v reduction even when the ray admits it.
    pub force_full_system: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-9,
            picard_tol: 1e-6,
            max_picard: 5000,
            max_newton: 30,
            sup_cap: 1e6,
            box_margin: 1e-8,
            force_full_system: false,
        }
    }
}

impl SolverSettings {
    /// Family-aware defaults. The exponential family blows up through
    /// moderate sup-norms, so its divergence cap is much tighter.
    pub fn for_system(system: &SystemSpec) -> Self {
        let mut s = SolverSettings::default();
        if matches!(system.family(), SystemFamily::Gelfand) {
            s.sup_cap = 50.0;
        }
        s
    }
}

/// Converged minimal solution at one parameter point.
#[derive(Debug, Clone)]
pub struct MinimalSolution {
    pub u: GridFunction,
    pub v: GridFunction,
    /// Final sup-norm residual of the discrete system.
    pub residual: f64,
    pub picard_iters: usize,
    pub newton_iters: usize,
}

/// Shared factorizations for repeated solves against one operator. The
/// operator matrix never changes along a branch, so its Cholesky factor is
/// computed once.
pub struct SolveContext<'a> {
    op: &'a DiscreteOperator,
    system: &'a SystemSpec,
    a: DMatrix<f64>,
    chol: SpdSolver,
}

impl<'a> SolveContext<'a> {
    pub fn new(op: &'a DiscreteOperator, system: &'a SystemSpec) -> Result<Self> {
        let a = op.matrix();
        let chol = SpdSolver::new(a.clone())?;
        Ok(SolveContext { op, system, a, chol })
    }

    pub fn operator(&self) -> &DiscreteOperator {
        self.op
    }

    pub fn system(&self) -> &SystemSpec {
        self.system
    }

    /// Smallest eigenvalue of the discrete operator; the scale anchor for
    /// the continuation's starting parameter.
    pub fn principal_eigenvalue(&self) -> Result<f64> {
        Ok(smallest_eigenpair(&self.a, None)?.value)
    }

    fn uses_reduction(&self, params: &RayParams, settings: &SolverSettings) -> bool {
        params.sigma() == 1.0 && self.system.is_symmetric() && !settings.force_full_system
    }

    /// Minimal solution at one ray point, warm-started from `init` when
    /// given. Fails with a constraint, divergence, or stall error when the
    /// point lies beyond the solvable range.
    pub fn minimal_solution(
        &self,
        params: &RayParams,
        init: Option<&MinimalSolution>,
        settings: &SolverSettings,
    ) -> Result<MinimalSolution> {
        if self.uses_reduction(params, settings) {
            self.solve_scalar(params, init, settings)
        } else {
            self.solve_full(params, init, settings)
        }
    }

    /// Stability indicator (smallest eigenvalue of the second-variation
    /// form) of a solved record, using the symmetric reduction whenever the
    /// solve itself used it so warm vectors keep a consistent dimension.
    pub fn stability(
        &self,
        params: &RayParams,
        sol: &MinimalSolution,
        warm: Option<&DVector<f64>>,
        settings: &SolverSettings,
    ) -> Result<SmallestEigen> {
        let form = StabilityForm::new(
            self.op,
            self.system,
            params.lambda(),
            params.gamma(),
            &sol.u,
            &sol.v,
        )?;
        let n = self.op.grid().len();
        if self.uses_reduction(params, settings) {
            let warm = warm.filter(|w| w.len() == n);
            form.smallest_symmetric(warm)
        } else {
            let warm = warm.filter(|w| w.len() == 2 * n);
            form.smallest(warm)
        }
    }

    /// Sup-norm residual of the discrete equations at an arbitrary state;
    /// used to revalidate stored records against the operator they claim to
    /// solve.
    pub fn residual_sup(
        &self,
        params: &RayParams,
        u: &GridFunction,
        v: &GridFunction,
    ) -> Result<f64> {
        self.op.check_aligned(u)?;
        self.op.check_aligned(v)?;
        let r = self.full_residual(&u.values, &v.values, params.lambda(), params.gamma())?;
        Ok(r.amax())
    }

    fn check_values(&self, vals: &[f64], settings: &SolverSettings) -> Result<()> {
        let bx = self.system.constraint_box();
        let mut sup = 0.0_f64;
        for &x in vals {
            if !x.is_finite() {
                return Err(Error::NumericalFailure("iterate lost finiteness".into()));
            }
            sup = sup.max(x.abs());
            if let Some(upper) = bx.upper {
                if x >= upper - settings.box_margin {
                    return Err(Error::ConstraintViolation(format!(
                        "iterate within {:.1e} of the admissible bound",
                        settings.box_margin
                    )));
                }
            }
        }
        if sup > settings.sup_cap {
            return Err(Error::NoSolution(format!(
                "iterate sup-norm {sup:.3e} exceeded the divergence cap {:.1e}",
                settings.sup_cap
            )));
        }
        Ok(())
    }

    /// Damped Newton update: halve the step until the candidate stays
    /// admissible and finite.
    fn damped_update(
        &self,
        current: &DVector<f64>,
        delta: &DVector<f64>,
        settings: &SolverSettings,
    ) -> Result<DVector<f64>> {
        let mut step = 1.0;
        let mut last = None;
        for _ in 0..12 {
            let mut candidate = current.clone();
            candidate.axpy(-step, delta, 1.0);
            match self.check_values(candidate.as_slice(), settings) {
                Ok(()) => return Ok(candidate),
                Err(e) => {
                    last = Some(e);
                    step *= 0.5;
                }
            }
        }
        Err(last.expect("twelve rejected damping steps leave an error"))
    }

    fn solve_scalar(
        &self,
        params: &RayParams,
        init: Option<&MinimalSolution>,
        settings: &SolverSettings,
    ) -> Result<MinimalSolution> {
        let n = self.op.grid().len();
        let lam = params.lambda();
        let mut u: DVector<f64> = match init {
            Some(m) => m.u.values.clone(),
            None => DVector::zeros(n),
        };
        self.check_values(u.as_slice(), settings)?;

        let mut picard_iters = 0;
        for _ in 0..settings.max_picard {
            picard_iters += 1;
            let mut rhs = DVector::zeros(n);
            for i in 0..n {
                rhs[i] = lam * self.system.eval(u[i], u[i])?.f;
            }
            let next = self.chol.solve(&rhs);
            let mut diff = 0.0_f64;
            for i in 0..n {
                diff = diff.max((next[i] - u[i]).abs());
            }
            u = next;
            self.check_values(u.as_slice(), settings)?;
            if diff <= settings.picard_tol {
                break;
            }
        }

        let mut newton_iters = 0;
        let mut residual = self.scalar_residual(&u, lam)?;
        let mut sup = residual.amax();
        while sup > settings.tol {
            if newton_iters >= settings.max_newton {
                return Err(Error::NumericalFailure(format!(
                    "newton residual stalled at {sup:.3e}"
                )));
            }
            newton_iters += 1;
            let mut j = self.a.clone();
            for i in 0..n {
                let e = self.system.eval(u[i], u[i])?;
                j[(i, i)] -= lam * (e.f_u + e.f_v);
            }
            let delta = LuSolver::new(j)?.solve(&residual)?;
            u = self.damped_update(&u, &delta, settings)?;
            residual = self.scalar_residual(&u, lam)?;
            sup = residual.amax();
        }

        let gf = GridFunction { values: u };
        Ok(MinimalSolution {
            u: gf.clone(),
            v: gf,
            residual: sup,
            picard_iters,
            newton_iters,
        })
    }

    fn scalar_residual(&self, u: &DVector<f64>, lam: f64) -> Result<DVector<f64>> {
        let mut r = &self.a * u;
        for i in 0..u.len() {
            r[i] -= lam * self.system.eval(u[i], u[i])?.f;
        }
        Ok(r)
    }

    fn solve_full(
        &self,
        params: &RayParams,
        init: Option<&MinimalSolution>,
        settings: &SolverSettings,
    ) -> Result<MinimalSolution> {
        let n = self.op.grid().len();
        let lam = params.lambda();
        let gam = params.gamma();
        let (mut u, mut v): (DVector<f64>, DVector<f64>) = match init {
            Some(m) => (m.u.values.clone(), m.v.values.clone()),
            None => (DVector::zeros(n), DVector::zeros(n)),
        };
        self.check_values(u.as_slice(), settings)?;
        self.check_values(v.as_slice(), settings)?;

        let mut picard_iters = 0;
        for _ in 0..settings.max_picard {
            picard_iters += 1;
            let mut rhs_u = DVector::zeros(n);
            let mut rhs_v = DVector::zeros(n);
            for i in 0..n {
                let e = self.system.eval(u[i], v[i])?;
                rhs_u[i] = lam * e.f;
                rhs_v[i] = gam * e.g;
            }
            let next_u = self.chol.solve(&rhs_u);
            let next_v = self.chol.solve(&rhs_v);
            let mut diff = 0.0_f64;
            for i in 0..n {
                diff = diff.max((next_u[i] - u[i]).abs());
                diff = diff.max((next_v[i] - v[i]).abs());
            }
            u = next_u;
            v = next_v;
            self.check_values(u.as_slice(), settings)?;
            self.check_values(v.as_slice(), settings)?;
            if diff <= settings.picard_tol {
                break;
            }
        }

        let mut newton_iters = 0;
        let mut residual = self.full_residual(&u, &v, lam, gam)?;
        let mut sup = residual.amax();
        while sup > settings.tol {
            if newton_iters >= settings.max_newton {
                return Err(Error::NumericalFailure(format!(
                    "newton residual stalled at {sup:.3e}"
                )));
            }
            newton_iters += 1;
            let mut j = DMatrix::zeros(2 * n, 2 * n);
            for bi in 0..n {
                for bj in 0..n {
                    j[(bi, bj)] = self.a[(bi, bj)];
                    j[(n + bi, n + bj)] = self.a[(bi, bj)];
                }
            }
            for i in 0..n {
                let e = self.system.eval(u[i], v[i])?;
                j[(i, i)] -= lam * e.f_u;
                j[(i, n + i)] = -lam * e.f_v;
                j[(n + i, i)] = -gam * e.g_u;
                j[(n + i, n + i)] -= gam * e.g_v;
            }
            let delta = LuSolver::new(j)?.solve(&residual)?;
            let mut stacked = DVector::zeros(2 * n);
            for i in 0..n {
                stacked[i] = u[i];
                stacked[n + i] = v[i];
            }
            let updated = self.damped_update(&stacked, &delta, settings)?;
            for i in 0..n {
                u[i] = updated[i];
                v[i] = updated[n + i];
            }
            residual = self.full_residual(&u, &v, lam, gam)?;
            sup = residual.amax();
        }

        Ok(MinimalSolution {
            u: GridFunction { values: u },
            v: GridFunction { values: v },
            residual: sup,
            picard_iters,
            newton_iters,
        })
    }

    fn full_residual(
        &self,
        u: &DVector<f64>,
        v: &DVector<f64>,
        lam: f64,
        gam: f64,
    ) -> Result<DVector<f64>> {
        let n = u.len();
        let au = &self.a * u;
        let av = &self.a * v;
        let mut r = DVector::zeros(2 * n);
        for i in 0..n {
            let e = self.system.eval(u[i], v[i])?;
            r[i] = au[i] - lam * e.f;
            r[n + i] = av[i] - gam * e.g;
        }
        Ok(r)
    }
}

/// Continuation controls.
#[derive(Debug, Clone, Copy)]
pub struct StepPolicy {
    /// Starting parameter; `None` anchors at 1e-3 times the smallest
    /// operator eigenvalue.
    pub lambda_init: Option<f64>,
    /// Initial relative parameter step, also the regrowth cap.
    pub initial_step: f64,
    /// Relative bracket width at which the branch endpoint is declared
    /// located.
    pub min_step: f64,
    pub max_records: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            lambda_init: None,
            initial_step: 0.5,
            min_step: 5e-4,
            max_records: 200,
        }
    }
}

/// How a continuation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchStatus {
    /// The parameter bracket around the branch endpoint closed below the
    /// resolution floor with ordinary solvability failures on the far side.
    FoldFound,
    /// Record budget ran out before the bracket closed.
    StepLimit,
    /// The far side of the bracket failed by pressing against the
    /// admissible bound rather than by losing solvability.
    ConstraintHit,
}

/// One accepted continuation point.
#[derive(Debug, Clone)]
pub struct BranchRecord {
    pub lambda: f64,
    pub gamma: f64,
    pub u: GridFunction,
    pub v: GridFunction,
    pub residual: f64,
    /// Smallest eigenvalue of the second-variation form; positive on every
    /// accepted record.
    pub stability: f64,
    pub picard_iters: usize,
    pub newton_iters: usize,
}

/// A computed minimal branch.
#[derive(Debug, Clone)]
pub struct Branch {
    pub sigma: f64,
    pub records: Vec<BranchRecord>,
    pub status: BranchStatus,
    /// Largest solved parameter and the smallest failed one (when any step
    /// failed).
    pub bracket: (f64, Option<f64>),
}

impl Branch {
    /// Endpoint estimate: the midpoint of the final bracket when it
    /// closed, else the last solved parameter.
    pub fn lambda_star(&self) -> f64 {
        match self.bracket.1 {
            Some(hi) => 0.5 * (self.bracket.0 + hi),
            None => self.bracket.0,
        }
    }
}

fn record_from(params: RayParams, sol: MinimalSolution, stability: f64) -> BranchRecord {
    BranchRecord {
        lambda: params.lambda(),
        gamma: params.gamma(),
        u: sol.u,
        v: sol.v,
        residual: sol.residual,
        stability,
        picard_iters: sol.picard_iters,
        newton_iters: sol.newton_iters,
    }
}

/// Walk the minimal branch upward in lambda until the endpoint is
/// bracketed, the record budget runs out, or the admissible bound blocks
/// further progress. Every accepted record is strictly stable; a converged
/// iterate with a nonpositive indicator is treated as a step failure so the
/// walk can never slide onto a non-minimal piece of the solution set.
pub fn continue_branch(
    op: &DiscreteOperator,
    system: &SystemSpec,
    sigma: f64,
    policy: &StepPolicy,
    settings: &SolverSettings,
) -> Result<Branch> {
    let ctx = SolveContext::new(op, system)?;
    let lambda0 = match policy.lambda_init {
        Some(l) => l,
        None => 1e-3 * ctx.principal_eigenvalue()?,
    };
    let params0 = RayParams::new(sigma, lambda0)?;
    let first = ctx
        .minimal_solution(&params0, None, settings)
        .map_err(|e| {
            Error::InfeasibleStart(format!(
                "no minimal solution at the starting parameter {lambda0:.6e}: {e}"
            ))
        })?;
    let mu = ctx.stability(&params0, &first, None, settings)?;
    if mu.value <= 0.0 {
        return Err(Error::InfeasibleStart(format!(
            "starting record is not stable (indicator {:.3e})",
            mu.value
        )));
    }
    let mut warm_eig = Some(mu.vector);
    let mut records = vec![record_from(params0, first, mu.value)];

    let mut delta = policy.initial_step;
    let mut fold_upper: Option<f64> = None;
    let mut fold_is_constraint = false;
    let status = loop {
        let lam_last = records.last().expect("nonempty records").lambda;
        if let Some(hi) = fold_upper {
            if hi - lam_last <= policy.min_step * lam_last {
                break if fold_is_constraint {
                    BranchStatus::ConstraintHit
                } else {
                    BranchStatus::FoldFound
                };
            }
        }
        if records.len() >= policy.max_records {
            break BranchStatus::StepLimit;
        }
        if delta < policy.min_step {
            break match fold_upper {
                Some(_) if fold_is_constraint => BranchStatus::ConstraintHit,
                Some(_) => BranchStatus::FoldFound,
                None => BranchStatus::StepLimit,
            };
        }

        let mut proposal = lam_last * (1.0 + delta);
        if let Some(hi) = fold_upper {
            // Never step past the known-bad side; aim at the midpoint so
            // the bracket shrinks geometrically whatever the outcome.
            proposal = proposal.min(0.5 * (lam_last + hi));
        }
        let params = RayParams::new(sigma, proposal)?;
        let init = {
            let prev = records.last().expect("nonempty records");
            MinimalSolution {
                u: prev.u.clone(),
                v: prev.v.clone(),
                residual: prev.residual,
                picard_iters: 0,
                newton_iters: 0,
            }
        };
        let attempt = ctx
            .minimal_solution(&params, Some(&init), settings)
            .and_then(|sol| {
                let mu = ctx.stability(&params, &sol, warm_eig.as_ref(), settings)?;
                if mu.value <= 0.0 {
                    return Err(Error::NoSolution(format!(
                        "converged iterate is unstable (indicator {:.3e})",
                        mu.value
                    )));
                }
                Ok((sol, mu))
            });
        match attempt {
            Ok((sol, mu)) => {
                let scale_u = init.u.max_abs().max(1.0);
                let scale_v = init.v.max_abs().max(1.0);
                for i in 0..sol.u.len() {
                    assert!(
                        sol.u.values[i] >= init.u.values[i] - 1e-10 * scale_u,
                        "minimal branch lost monotonicity in u at node {i}"
                    );
                    assert!(
                        sol.v.values[i] >= init.v.values[i] - 1e-10 * scale_v,
                        "minimal branch lost monotonicity in v at node {i}"
                    );
                }
                let value = mu.value;
                warm_eig = Some(mu.vector);
                records.push(record_from(params, sol, value));
                delta = (delta * 1.2).min(policy.initial_step);
            }
            Err(e) => {
                fold_is_constraint = matches!(e, Error::ConstraintViolation(_));
                fold_upper = Some(proposal);
                delta *= 0.5;
            }
        }
    };

    let last_lambda = records.last().expect("nonempty records").lambda;
    Ok(Branch {
        sigma,
        records,
        status,
        bracket: (last_lambda, fold_upper),
    })
}

/// Endpoint profile extrapolated from the last records of a branch with the
/// two-term model  w(lambda) = w* + a sqrt(t) + b t,  t = lambda_ref -
/// lambda, anchored at the failed side of the final bracket. The model
/// interpolates the last three records exactly.
#[derive(Debug, Clone)]
pub struct ExtremalEstimate {
    /// Fold anchor: the failed-side end of the final bracket.
    pub lambda_ref: f64,
    pub u_star: GridFunction,
    pub v_star: GridFunction,
    u_sqrt: DVector<f64>,
    u_lin: DVector<f64>,
    v_sqrt: DVector<f64>,
    v_lin: DVector<f64>,
    /// Boundary-decay-weighted mass of each right-hand side at the
    /// endpoint, h * sum F(u*, v*) d_i^s with d_i the distance to the
    /// domain edge; `None` when the endpoint leaves the admissible box.
    pub weak_mass_f: Option<f64>,
    pub weak_mass_g: Option<f64>,
}

impl ExtremalEstimate {
    /// Evaluate the fitted branch at a parameter at or below the anchor.
    pub fn eval_at(&self, lambda: f64) -> Result<(GridFunction, GridFunction)> {
        if !(lambda <= self.lambda_ref) {
            return Err(Error::Domain(format!(
                "fit is only valid up to the anchor {:.6e}",
                self.lambda_ref
            )));
        }
        let t = self.lambda_ref - lambda;
        let rt = t.sqrt();
        let n = self.u_star.len();
        let mut u = DVector::zeros(n);
        let mut v = DVector::zeros(n);
        for i in 0..n {
            u[i] = self.u_star.values[i] + self.u_sqrt[i] * rt + self.u_lin[i] * t;
            v[i] = self.v_star.values[i] + self.v_sqrt[i] * rt + self.v_lin[i] * t;
        }
        Ok((GridFunction { values: u }, GridFunction { values: v }))
    }
}

/// Fit the endpoint model through the last three records of a branch.
pub fn extremal_estimate(
    op: &DiscreteOperator,
    system: &SystemSpec,
    branch: &Branch,
) -> Result<ExtremalEstimate> {
    let lambda_ref = branch.bracket.1.ok_or_else(|| {
        Error::NeedMoreRecords("the branch never bracketed its endpoint".into())
    })?;
    if branch.records.len() < 3 {
        return Err(Error::NeedMoreRecords(format!(
            "endpoint fit needs three records, have {}",
            branch.records.len()
        )));
    }
    let tail = &branch.records[branch.records.len() - 3..];
    let t_max = lambda_ref - tail[0].lambda;
    if !(t_max > 0.0) {
        return Err(Error::NeedMoreRecords(
            "records do not precede the bracket anchor".into(),
        ));
    }
    // Normalized design matrix in tau = t / t_max for conditioning.
    let mut m = DMatrix::zeros(3, 3);
    for (k, r) in tail.iter().enumerate() {
        let tau = (lambda_ref - r.lambda) / t_max;
        m[(k, 0)] = 1.0;
        m[(k, 1)] = tau.sqrt();
        m[(k, 2)] = tau;
    }
    let lu = LuSolver::new(m)?;
    let n = op.grid().len();
    let mut star_u = DVector::zeros(n);
    let mut sqrt_u = DVector::zeros(n);
    let mut lin_u = DVector::zeros(n);
    let mut star_v = DVector::zeros(n);
    let mut sqrt_v = DVector::zeros(n);
    let mut lin_v = DVector::zeros(n);
    let mut rhs = DVector::zeros(3);
    for i in 0..n {
        for (k, r) in tail.iter().enumerate() {
            rhs[k] = r.u.values[i];
        }
        let c = lu.solve(&rhs)?;
        star_u[i] = c[0];
        sqrt_u[i] = c[1] / t_max.sqrt();
        lin_u[i] = c[2] / t_max;
        for (k, r) in tail.iter().enumerate() {
            rhs[k] = r.v.values[i];
        }
        let c = lu.solve(&rhs)?;
        star_v[i] = c[0];
        sqrt_v[i] = c[1] / t_max.sqrt();
        lin_v[i] = c[2] / t_max;
    }

    let u_star = GridFunction { values: star_u };
    let v_star = GridFunction { values: star_v };
    let h = op.grid().spacing();
    let r_half = op.grid().half_width();
    let s = op.order();
    let mut mass_f = 0.0;
    let mut mass_g = 0.0;
    let mut admissible = true;
    for i in 0..n {
        match system.eval(u_star.values[i], v_star.values[i]) {
            Ok(e) => {
                let d = (r_half - op.grid().node(i).abs()).max(0.0);
                mass_f += e.f * d.powf(s);
                mass_g += e.g * d.powf(s);
            }
            Err(_) => {
                admissible = false;
                break;
            }
        }
    }
    Ok(ExtremalEstimate {
        lambda_ref,
        u_star,
        v_star,
        u_sqrt: sqrt_u,
        u_lin: lin_u,
        v_sqrt: sqrt_v,
        v_lin: lin_v,
        weak_mass_f: admissible.then_some(h * mass_f),
        weak_mass_g: admissible.then_some(h * mass_g),
    })
}
