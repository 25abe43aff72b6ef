//! The four coupled nonlinearity families — exponential, power, singular
//! power, and gradient — with exact partial derivatives, admissible boxes,
//! ray parametrization, and the structural-condition probes used to sort
//! scalar profiles (superlinearity, third-derivative ratio floor, convexity
//! growth ratio).

use crate::error::{Error, Result};

/// Scalar nonlinearity profiles available to the gradient family and the
/// structural-condition probes. All are normalized to value 1 at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarProfile {
    /// e^t
    Exponential,
    /// (1 + t)^p on t > -1
    ShiftedPower { p: f64 },
    /// (1 - t)^{-p} on t < 1
    SingularPower { p: f64 },
    /// 1 + t; grows too slowly for the superlinearity requirement.
    Affine,
    /// 1 + t^2; third derivative vanishes identically.
    Quadratic,
}

impl ScalarProfile {
    /// Largest open interval on which the profile and its derivatives exist.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            ScalarProfile::ShiftedPower { .. } => (-1.0, f64::INFINITY),
            ScalarProfile::SingularPower { .. } => (f64::NEG_INFINITY, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if t > lo && t < hi {
            Ok(())
        } else {
            Err(Error::ConstraintViolation(format!(
                "profile argument {t} outside the open interval ({lo}, {hi})"
            )))
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            ScalarProfile::Exponential => t.exp(),
            ScalarProfile::ShiftedPower { p } => (1.0 + t).powf(p),
            ScalarProfile::SingularPower { p } => (1.0 - t).powf(-p),
            ScalarProfile::Affine => 1.0 + t,
            ScalarProfile::Quadratic => 1.0 + t * t,
        })
    }

    pub fn d1(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            ScalarProfile::Exponential => t.exp(),
            ScalarProfile::ShiftedPower { p } => p * (1.0 + t).powf(p - 1.0),
            ScalarProfile::SingularPower { p } => p * (1.0 - t).powf(-p - 1.0),
            ScalarProfile::Affine => 1.0,
            ScalarProfile::Quadratic => 2.0 * t,
        })
    }

    pub fn d2(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            ScalarProfile::Exponential => t.exp(),
            ScalarProfile::ShiftedPower { p } => p * (p - 1.0) * (1.0 + t).powf(p - 2.0),
            ScalarProfile::SingularPower { p } => {
                p * (p + 1.0) * (1.0 - t).powf(-p - 2.0)
            }
            ScalarProfile::Affine => 0.0,
            ScalarProfile::Quadratic => 2.0,
        })
    }

    pub fn d3(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            ScalarProfile::Exponential => t.exp(),
            ScalarProfile::ShiftedPower { p } => {
                p * (p - 1.0) * (p - 2.0) * (1.0 + t).powf(p - 3.0)
            }
            ScalarProfile::SingularPower { p } => {
                p * (p + 1.0) * (p + 2.0) * (1.0 - t).powf(-p - 3.0)
            }
            ScalarProfile::Affine | ScalarProfile::Quadratic => 0.0,
        })
    }

    /// Geometric probe grid reaching into the profile's growth regime; the
    /// singular profile instead approaches its endpoint from below.
    pub fn default_probes(&self) -> Vec<f64> {
        match self {
            ScalarProfile::SingularPower { .. } => {
                // 1 - 10^{-k}: the blow-up endpoint drives the tail behavior.
                (1..=24).map(|k| 1.0 - 10f64.powf(-0.25 * k as f64)).collect()
            }
            _ => geometric_probes(1e-2, 1e6, 81),
        }
    }
}

/// Strictly increasing geometric grid from `lo` to `hi` with `count` points.
pub fn geometric_probes(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// The four system families. `F` drives the `u`-equation, `G` the
/// `v`-equation:
/// Gelfand        F = e^v,            G = e^u;
/// Lane-Emden     F = (1+v)^p,        G = (1+u)^p;
/// singular power F = (1-v)^{-p},     G = (1-u)^{-p} on 0 <= u, v < 1;
/// gradient       F = f'(u) g(v),     G = f(u) g'(v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemFamily {
    Gelfand,
    LaneEmden { p: f64 },
    Mems { p: f64 },
    Gradient { f: ScalarProfile, g: ScalarProfile },
}

/// Right-hand sides and their first partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemEval {
    pub f: f64,
    pub g: f64,
    pub f_u: f64,
    pub f_v: f64,
    pub g_u: f64,
    pub g_v: f64,
}

/// Admissible box for the solution pair. The lower bound is always 0;
/// singular families impose an exclusive upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleBox {
    pub upper: Option<f64>,
}

impl AdmissibleBox {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && v >= 0.0 && self.upper.is_none_or(|m| u < m && v < m)
    }
}

/// A validated nonlinearity package.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    family: SystemFamily,
}

impl SystemSpec {
    pub fn gelfand() -> Self {
        SystemSpec { family: SystemFamily::Gelfand }
    }

    pub fn lane_emden(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("power family needs p > 1, got {p}")));
        }
        Ok(SystemSpec { family: SystemFamily::LaneEmden { p } })
    }

    pub fn mems(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!(
                "singular power family needs p > 1, got {p}"
            )));
        }
        Ok(SystemSpec { family: SystemFamily::Mems { p } })
    }

    /// Gradient system with right-hand sides f'(u) g(v) and f(u) g'(v).
    /// Both profiles must start with positive slope; the probes in this
    /// module report on the remaining structural requirements.
    pub fn gradient(f: ScalarProfile, g: ScalarProfile) -> Result<Self> {
        for (name, profile) in [("f", f), ("g", g)] {
            if !(profile.d1(0.0)? > 0.0) {
                return Err(Error::Domain(format!(
                    "gradient family needs {name}'(0) > 0"
                )));
            }
        }
        Ok(SystemSpec { family: SystemFamily::Gradient { f, g } })
    }

    /// The concrete power pair (1+u)^p, (1+v)^q of the gradient family.
    pub fn gradient_powers(p: f64, q: f64) -> Result<Self> {
        for value in [p, q] {
            if !(value > 1.0) || !value.is_finite() {
                return Err(Error::Domain(format!(
                    "gradient power pair needs exponents > 1, got {value}"
                )));
            }
        }
        SystemSpec::gradient(
            ScalarProfile::ShiftedPower { p },
            ScalarProfile::ShiftedPower { p: q },
        )
    }

    pub fn family(&self) -> SystemFamily {
        self.family
    }

    /// True when swapping (u, v) swaps the two equations, so the ray
    /// sigma = 1 admits the reduction u = v.
    pub fn is_symmetric(&self) -> bool {
        match self.family {
            SystemFamily::Gelfand
            | SystemFamily::LaneEmden { .. }
            | SystemFamily::Mems { .. } => true,
            SystemFamily::Gradient { f, g } => f == g,
        }
    }

    pub fn constraint_box(&self) -> AdmissibleBox {
        let singular = matches!(self.family, SystemFamily::Mems { .. })
            || matches!(
                self.family,
                SystemFamily::Gradient { f: ScalarProfile::SingularPower { .. }, .. }
                    | SystemFamily::Gradient {
                        g: ScalarProfile::SingularPower { .. },
                        ..
                    }
            );
        AdmissibleBox { upper: singular.then_some(1.0) }
    }

    /// Right-hand sides and partials at a point of the admissible region.
    pub fn eval(&self, u: f64, v: f64) -> Result<SystemEval> {
        match self.family {
            SystemFamily::Gelfand => Ok(SystemEval {
                f: v.exp(),
                g: u.exp(),
                f_u: 0.0,
                f_v: v.exp(),
                g_u: u.exp(),
                g_v: 0.0,
            }),
            SystemFamily::LaneEmden { p } => {
                if v <= -1.0 || u <= -1.0 {
                    return Err(Error::ConstraintViolation(format!(
                        "power family undefined at ({u}, {v})"
                    )));
                }
                Ok(SystemEval {
                    f: (1.0 + v).powf(p),
                    g: (1.0 + u).powf(p),
                    f_u: 0.0,
                    f_v: p * (1.0 + v).powf(p - 1.0),
                    g_u: p * (1.0 + u).powf(p - 1.0),
                    g_v: 0.0,
                })
            }
            SystemFamily::Mems { p } => {
                if u >= 1.0 || v >= 1.0 {
                    return Err(Error::ConstraintViolation(format!(
                        "singular family touched its quench value at ({u}, {v})"
                    )));
                }
                Ok(SystemEval {
                    f: (1.0 - v).powf(-p),
                    g: (1.0 - u).powf(-p),
                    f_u: 0.0,
                    f_v: p * (1.0 - v).powf(-p - 1.0),
                    g_u: p * (1.0 - u).powf(-p - 1.0),
                    g_v: 0.0,
                })
            }
            SystemFamily::Gradient { f, g } => Ok(SystemEval {
                f: f.d1(u)? * g.eval(v)?,
                g: f.eval(u)? * g.d1(v)?,
                f_u: f.d2(u)? * g.eval(v)?,
                f_v: f.d1(u)? * g.d1(v)?,
                g_u: f.d1(u)? * g.d1(v)?,
                g_v: f.eval(u)? * g.d2(v)?,
            }),
        }
    }
}

/// A point on the ray gamma = sigma * lambda. gamma is always derived from
/// the other two, so the ratio is exact by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayParams {
    sigma: f64,
    lambda: f64,
    gamma: f64,
}

impl RayParams {
    pub fn new(sigma: f64, lambda: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("ray slope must be positive, got {sigma}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "ray parameter must be positive, got {lambda}"
            )));
        }
        Ok(RayParams { sigma, lambda, gamma: sigma * lambda })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same ray at a different parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        RayParams::new(self.sigma, lambda)
    }
}

/// Advisory report from a structural probe: pass/fail plus the list of
/// violated requirements (never an error — the caller decides what to do).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub pass: bool,
    pub violations: Vec<String>,
}

/// Finite proxy threshold for superlinear growth: f(T)/T must reach this
/// factor at the largest probe.
pub const SUPERLINEAR_FACTOR: f64 = 10.0;

/// Probes "increasing, convex, value 1 at zero, superlinear at infinity" on
/// the supplied grid. The growth requirement is a finite proxy: a limit
/// cannot be machine-checked, so the report is advisory by design.
pub fn check_superlinearity(f: ScalarProfile, probes: &[f64]) -> ConditionReport {
    let mut violations = Vec::new();
    match f.eval(0.0) {
        Ok(v) if (v - 1.0).abs() <= 1e-12 => {}
        Ok(v) => violations.push(format!("value at zero is {v}, not 1")),
        Err(e) => violations.push(format!("not evaluable at zero: {e}")),
    }
    for &t in probes {
        match f.d1(t) {
            Ok(d) if d > 0.0 => {}
            Ok(d) => {
                violations.push(format!("slope {d} at t = {t} is not positive"));
                break;
            }
            Err(_) => {}
        }
    }
    for &t in probes {
        match f.d2(t) {
            Ok(d) if d >= 0.0 => {}
            Ok(d) => {
                violations.push(format!("curvature {d} at t = {t} is negative"));
                break;
            }
            Err(_) => {}
        }
    }
    if let Some(&top) = probes.last() {
        match f.eval(top) {
            Ok(v) if v / top.max(1e-300) >= SUPERLINEAR_FACTOR => {}
            Ok(v) => violations.push(format!(
                "growth factor {:.3} at t = {top} below the superlinearity proxy {SUPERLINEAR_FACTOR}",
                v / top
            )),
            Err(e) => violations.push(format!("not evaluable at t = {top}: {e}")),
        }
    } else {
        violations.push("empty probe grid".into());
    }
    ConditionReport { pass: violations.is_empty(), violations }
}

/// Outcome of the third-derivative ratio probe.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    /// Minimum of [f'']^2 / (f''' f') over the usable tail probes.
    pub minimum: Option<f64>,
    /// The third derivative vanished at every tail probe.
    pub degenerate: bool,
}

/// Tail minimum of [f'']^2 / (f''' f') on the upper half of the probe grid.
/// Probes where the derivatives overflow are skipped; probes where f'''
/// vanishes are counted as degenerate.
pub fn second_derivative_ratio_floor(f: ScalarProfile, probes: &[f64]) -> RatioReport {
    let tail = &probes[probes.len() / 2..];
    let mut minimum = f64::INFINITY;
    let mut usable = 0usize;
    let mut degenerate = 0usize;
    for &t in tail {
        let (Ok(d1), Ok(d2), Ok(d3)) = (f.d1(t), f.d2(t), f.d3(t)) else { continue };
        if d3 == 0.0 {
            degenerate += 1;
            continue;
        }
        let ratio = (d2 * d2) / (d3 * d1);
        if ratio.is_finite() {
            minimum = minimum.min(ratio);
            usable += 1;
        }
    }
    if usable == 0 {
        RatioReport { minimum: None, degenerate: degenerate > 0 }
    } else {
        RatioReport { minimum: Some(minimum), degenerate: false }
    }
}

/// Tail supremum of f f'' / (f')^2 on the upper half of the probe grid,
/// skipping probes where the values overflow.
pub fn convexity_growth_ratio(f: ScalarProfile, probes: &[f64]) -> f64 {
    let tail = &probes[probes.len() / 2..];
    let mut sup = f64::NEG_INFINITY;
    for &t in tail {
        let (Ok(v), Ok(d1), Ok(d2)) = (f.eval(t), f.d1(t), f.d2(t)) else { continue };
        let ratio = v * d2 / (d1 * d1);
        if ratio.is_finite() {
            sup = sup.max(ratio);
        }
    }
    sup
}
