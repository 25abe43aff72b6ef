//! Run configuration: parameter sweeps, command defaults, the optional TOML
//! overlay file, and the validation pass that rejects a bad run before any
//! computation starts.

use crate::discretize::{assemble, DiscreteOperator, Grid, SingularRule};
use crate::error::{Error, Result};
use crate::kernel::SpectralKernel;
use crate::report::BranchMeta;
use crate::solve::StepPolicy;
use crate::systems::SystemSpec;
use serde::Deserialize;
use std::str::FromStr;

/// Parses a parameter sweep: either an explicit comma list `a,b,c` or an
/// inclusive linear range `start:end:count`.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parse_one = |s: &str| -> Result<f64> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("not a number: {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Config(format!("sweep value {x} is not finite")));
        }
        Ok(x)
    };
    if let Some((range, count)) = text.rsplit_once(':') {
        if let Some((start, end)) = range.split_once(':') {
            let start = parse_one(start)?;
            let end = parse_one(end)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("not a count: {count:?}")))?;
            if count == 0 {
                return Ok(Vec::new());
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (end - start) / (count - 1) as f64;
            return Ok((0..count).map(|i| start + step * i as f64).collect());
        }
        return Err(Error::Config(format!(
            "range must be start:end:count, got {text:?}"
        )));
    }
    text.split(',').map(parse_one).collect()
}

/// The four coupled system families by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Gelfand,
    LaneEmden,
    Mems,
    Gradient,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gelfand" => Ok(FamilyKind::Gelfand),
            "lane_emden" => Ok(FamilyKind::LaneEmden),
            "mems" => Ok(FamilyKind::Mems),
            "gradient" => Ok(FamilyKind::Gradient),
            other => Err(Error::Config(format!(
                "unknown family {other:?} (expected gelfand, lane_emden, mems, or gradient)"
            ))),
        }
    }
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Gelfand => "gelfand",
            FamilyKind::LaneEmden => "lane_emden",
            FamilyKind::Mems => "mems",
            FamilyKind::Gradient => "gradient",
        }
    }
}

pub fn parse_rule(s: &str) -> Result<SingularRule> {
    match s {
        "cell_exact" => Ok(SingularRule::CellExact),
        "taylor2" => Ok(SingularRule::Taylor2),
        other => Err(Error::Config(format!(
            "unknown singular rule {other:?} (expected cell_exact or taylor2)"
        ))),
    }
}

pub fn rule_name(rule: SingularRule) -> &'static str {
    match rule {
        SingularRule::CellExact => "cell_exact",
        SingularRule::Taylor2 => "taylor2",
    }
}

/// Partially specified continuation run, as read from flags or the TOML
/// file; unset fields fall back through the overlay chain to the defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialContinue {
    pub family: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub r: Option<f64>,
    pub singular_rule: Option<String>,
    pub seed: Option<u64>,
    pub lambda_init: Option<f64>,
    pub initial_step: Option<f64>,
    pub min_step: Option<f64>,
    pub max_records: Option<usize>,
}

impl PartialContinue {
    /// Field-wise overlay: values in `self` win over `fallback`.
    pub fn or(self, fallback: Self) -> Self {
        PartialContinue {
            family: self.family.or(fallback.family),
            p: self.p.or(fallback.p),
            q: self.q.or(fallback.q),
            s: self.s.or(fallback.s),
            sigma: self.sigma.or(fallback.sigma),
            n: self.n.or(fallback.n),
            r: self.r.or(fallback.r),
            singular_rule: self.singular_rule.or(fallback.singular_rule),
            seed: self.seed.or(fallback.seed),
            lambda_init: self.lambda_init.or(fallback.lambda_init),
            initial_step: self.initial_step.or(fallback.initial_step),
            min_step: self.min_step.or(fallback.min_step),
            max_records: self.max_records.or(fallback.max_records),
        }
    }
}

/// Fully resolved and validated continuation run.
#[derive(Debug, Clone)]
pub struct ContinueConfig {
    pub family: FamilyKind,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: f64,
    pub sigma: f64,
    pub n: usize,
    pub r: f64,
    pub rule: SingularRule,
    pub seed: u64,
    pub lambda_init: Option<f64>,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_records: usize,
}

impl ContinueConfig {
    pub fn resolve(partial: PartialContinue) -> Result<Self> {
        let defaults = StepPolicy::default();
        let family: FamilyKind = partial
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("a family is required".into()))?
            .parse()?;
        let config = ContinueConfig {
            family,
            p: partial.p,
            q: partial.q,
            s: partial.s.unwrap_or(0.5),
            sigma: partial.sigma.unwrap_or(1.0),
            n: partial.n.unwrap_or(400),
            r: partial.r.unwrap_or(1.0),
            rule: parse_rule(partial.singular_rule.as_deref().unwrap_or("cell_exact"))?,
            seed: partial.seed.unwrap_or(0),
            lambda_init: partial.lambda_init,
            initial_step: partial.initial_step.unwrap_or(defaults.initial_step),
            min_step: partial.min_step.unwrap_or(defaults.min_step),
            max_records: partial.max_records.unwrap_or(defaults.max_records),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Config(format!(
                "kernel order s must lie in (0, 1), got {}",
                self.s
            )));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!(
                "ray slope sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.n < 2 {
            return Err(Error::Config(format!(
                "node count must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::Config(format!(
                "domain half-width must be positive, got {}",
                self.r
            )));
        }
        if let Some(l) = self.lambda_init {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Config(format!(
                    "starting parameter must be positive, got {l}"
                )));
            }
        }
        if !(self.initial_step > 0.0 && self.initial_step <= 1.0) {
            return Err(Error::Config(format!(
                "initial step must lie in (0, 1], got {}",
                self.initial_step
            )));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return Err(Error::Config(format!(
                "minimal step must lie in (0, initial_step], got {}",
                self.min_step
            )));
        }
        if self.max_records < 3 {
            return Err(Error::Config(format!(
                "need at least 3 records for the endpoint fit, got {}",
                self.max_records
            )));
        }
        self.system()?;
        Ok(())
    }

    pub fn system(&self) -> Result<SystemSpec> {
        let need_p = || {
            self.p.ok_or_else(|| {
                Error::Config(format!("family {} needs --p", self.family.name()))
            })
        };
        match self.family {
            FamilyKind::Gelfand => Ok(SystemSpec::gelfand()),
            FamilyKind::LaneEmden => SystemSpec::lane_emden(need_p()?),
            FamilyKind::Mems => SystemSpec::mems(need_p()?),
            FamilyKind::Gradient => {
                let p = need_p()?;
                let q = self
                    .q
                    .ok_or_else(|| Error::Config("gradient family needs --q".into()))?;
                SystemSpec::gradient_powers(p, q)
            }
        }
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn operator(&self) -> Result<DiscreteOperator> {
        let kernel = SpectralKernel::fractional_laplacian(self.s)?;
        let grid = Grid::uniform(self.n, self.r)?;
        assemble(&kernel, &grid, self.rule)
    }

    pub fn policy(&self) -> StepPolicy {
        StepPolicy {
            lambda_init: self.lambda_init,
            initial_step: self.initial_step,
            min_step: self.min_step,
            max_records: self.max_records,
        }
    }

    pub fn meta(&self) -> BranchMeta {
        BranchMeta {
            seed: self.seed,
            family: self.family.name().to_string(),
            p: self.p,
            q: self.q,
            s: self.s,
            n: self.n,
            r: self.r,
            singular_rule: rule_name(self.rule).to_string(),
        }
    }
}

/// Verification checks selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Stability,
    Residual,
    Corollary,
    Estimates,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Stability => "stability",
            CheckKind::Residual => "residual",
            CheckKind::Corollary => "corollary",
            CheckKind::Estimates => "estimates",
        }
    }
}

/// Parses a comma-separated checks selection; `all` expands to every check
/// and an empty string selects nothing.
pub fn parse_checks(text: &str) -> Result<Vec<CheckKind>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part {
            "stability" => out.push(CheckKind::Stability),
            "residual" => out.push(CheckKind::Residual),
            "corollary" => out.push(CheckKind::Corollary),
            "estimates" => out.push(CheckKind::Estimates),
            "all" => {
                return Ok(vec![
                    CheckKind::Stability,
                    CheckKind::Residual,
                    CheckKind::Corollary,
                    CheckKind::Estimates,
                ])
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown check {other:?} (expected stability, residual, corollary, estimates, or all)"
                )))
            }
        }
    }
    out.dedup();
    Ok(out)
}

/// Partial verify-run settings from flags or the TOML file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialVerify {
    pub checks: Option<String>,
    pub t: Option<f64>,
    pub stride: Option<usize>,
    pub seed: Option<u64>,
}

impl PartialVerify {
    pub fn or(self, fallback: Self) -> Self {
        PartialVerify {
            checks: self.checks.or(fallback.checks),
            t: self.t.or(fallback.t),
            stride: self.stride.or(fallback.stride),
            seed: self.seed.or(fallback.seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub checks: Vec<CheckKind>,
    pub t: Option<f64>,
    pub stride: usize,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn resolve(partial: PartialVerify) -> Result<Self> {
        let checks = parse_checks(partial.checks.as_deref().unwrap_or("all"))?;
        let stride = partial.stride.unwrap_or(1);
        if stride == 0 {
            return Err(Error::Config("record stride must be positive".into()));
        }
        if let Some(t) = partial.t {
            if !t.is_finite() {
                return Err(Error::Config(format!("moment exponent t must be finite, got {t}")));
            }
        }
        Ok(VerifyConfig {
            checks,
            t: partial.t,
            stride,
            seed: partial.seed.unwrap_or(0),
        })
    }

    /// Family-specific default for the moment exponent: the smallest value
    /// comfortably inside every validity floor.
    pub fn exponent_for(&self, system: &SystemSpec) -> f64 {
        use crate::systems::SystemFamily;
        if let Some(t) = self.t {
            return t;
        }
        match system.family() {
            SystemFamily::Gelfand => 1.0,
            SystemFamily::LaneEmden { p } => 1.5f64.max(0.5 * (p - 1.0) + 0.5),
            SystemFamily::Mems { p } => 1.5f64.max(0.5 * (p + 1.0)),
            SystemFamily::Gradient { .. } => 1.5,
        }
    }
}

/// The optional TOML configuration file: one table per supported command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "continue")]
    pub continue_run: Option<PartialContinue>,
    pub verify: Option<PartialVerify>,
}

pub fn load_file(text: &str) -> Result<FileConfig> {
    toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
}

/// The only environment variable the tool reads: a thread-count request.
/// Numerical kernels currently run sequentially, so the value is validated
/// and recorded but does not change execution.
pub fn thread_count_from_env() -> Result<Option<usize>> {
    match std::env::var("NLSYS_THREADS") {
        Err(_) => Ok(None),
        Ok(text) => {
            let count: usize = text
                .parse()
                .map_err(|_| Error::Config(format!("NLSYS_THREADS must be a positive integer, got {text:?}")))?;
            if count == 0 {
                return Err(Error::Config("NLSYS_THREADS must be a positive integer, got 0".into()));
            }
            Ok(Some(count))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_accepts_lists_and_ranges() {
        assert_eq!(parse_sweep("2,3,5").unwrap(), vec![2.0, 3.0, 5.0]);
        assert_eq!(parse_sweep("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_sweep("0.3:0.7:1").unwrap(), vec![0.3]);
        assert_eq!(parse_sweep("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_sweep("1:2:0").unwrap(), Vec::<f64>::new());
        assert!(parse_sweep("1:2").is_err());
        assert!(parse_sweep("a,b").is_err());
    }

    #[test]
    fn continue_defaults_fill_in() {
        let partial = PartialContinue {
            family: Some("gelfand".into()),
            ..Default::default()
        };
        let config = ContinueConfig::resolve(partial).unwrap();
        assert_eq!(config.n, 400);
        assert_eq!(config.r, 1.0);
        assert_eq!(config.s, 0.5);
        assert_eq!(config.sigma, 1.0);
        assert_eq!(config.max_records, 200);
    }

    #[test]
    fn bad_configs_are_rejected_before_any_work() {
        let base = PartialContinue {
            family: Some("gelfand".into()),
            ..Default::default()
        };
        let zero_nodes = PartialContinue { n: Some(0), ..base.clone() };
        assert!(matches!(
            ContinueConfig::resolve(zero_nodes),
            Err(Error::Config(_))
        ));
        let bad_s = PartialContinue { s: Some(1.5), ..base.clone() };
        assert!(ContinueConfig::resolve(bad_s).is_err());
        let missing_p = PartialContinue {
            family: Some("mems".into()),
            ..Default::default()
        };
        assert!(ContinueConfig::resolve(missing_p).is_err());
        let no_family = PartialContinue::default();
        assert!(ContinueConfig::resolve(no_family).is_err());
    }

    #[test]
    fn file_overlay_yields_to_flags() {
        let file = load_file("[continue]\nfamily = \"lane_emden\"\np = 2.0\nn = 64\n").unwrap();
        let flags = PartialContinue {
            n: Some(128),
            ..Default::default()
        };
        let merged = flags.or(file.continue_run.unwrap());
        let config = ContinueConfig::resolve(merged).unwrap();
        assert_eq!(config.family, FamilyKind::LaneEmden);
        assert_eq!(config.n, 128);
        assert_eq!(config.p, Some(2.0));
    }

    #[test]
    fn unknown_file_keys_are_config_errors() {
        assert!(matches!(
            load_file("[continue]\nfamili = \"gelfand\"\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(load_file("[surprise]\n"), Err(Error::Config(_))));
    }

    #[test]
    fn checks_parse_and_expand() {
        assert_eq!(parse_checks("").unwrap(), Vec::<CheckKind>::new());
        assert_eq!(
            parse_checks("stability,residual").unwrap(),
            vec![CheckKind::Stability, CheckKind::Residual]
        );
        assert_eq!(parse_checks("all").unwrap().len(), 4);
        assert!(parse_checks("vibes").is_err());
    }

    #[test]
    fn exponent_defaults_respect_validity_floors() {
        let config = VerifyConfig::resolve(PartialVerify::default()).unwrap();
        assert_eq!(config.exponent_for(&SystemSpec::gelfand()), 1.0);
        assert_eq!(
            config.exponent_for(&SystemSpec::lane_emden(2.0).unwrap()),
            1.5
        );
        assert_eq!(config.exponent_for(&SystemSpec::mems(4.0).unwrap()), 2.5);
        let pinned = VerifyConfig::resolve(PartialVerify {
            t: Some(2.25),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(pinned.exponent_for(&SystemSpec::gelfand()), 2.25);
    }
}
