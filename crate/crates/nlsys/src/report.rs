//! Machine-readable artifacts: versioned JSON branch and verification files
//! plus a CSV plot table.  Emission is hand-rolled with a fixed field order
//! and 17-significant-digit floats, so emit -> parse -> emit is byte
//! identical and every recorded value parses back to the same bits.

use crate::discretize::{assemble, DiscreteOperator, Grid, GridFunction, SingularRule};
use crate::error::{Error, Result};
use crate::kernel::SpectralKernel;
use crate::solve::{Branch, BranchStatus};
use crate::systems::SystemSpec;
use crate::verify::{EstimateReport, InequalityReport};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

/// Run metadata carried into every branch artifact so a verifier can rebuild
/// the exact operator and system without the original command line.
#[derive(Debug, Clone)]
pub struct BranchMeta {
    pub seed: u64,
    pub family: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: f64,
    pub n: usize,
    pub r: f64,
    pub singular_rule: String,
}

/// One continuation record in artifact form.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordArtifact {
    pub lambda: f64,
    pub gamma: f64,
    pub residual: f64,
    pub stability: f64,
    pub picard_iters: u64,
    pub newton_iters: u64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// A full continuation run: provenance, grid/system description, endpoint
/// bracket, and every accepted record.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchArtifact {
    pub schema_version: u32,
    pub seed: u64,
    pub family: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: f64,
    pub sigma: f64,
    pub n: u64,
    pub r: f64,
    pub singular_rule: String,
    pub status: String,
    pub bracket_low: f64,
    pub bracket_high: Option<f64>,
    pub records: Vec<RecordArtifact>,
}

fn status_name(status: BranchStatus) -> &'static str {
    match status {
        BranchStatus::FoldFound => "fold_found",
        BranchStatus::StepLimit => "step_limit",
        BranchStatus::ConstraintHit => "constraint_hit",
    }
}

impl BranchArtifact {
    pub fn from_branch(branch: &Branch, meta: &BranchMeta) -> Self {
        BranchArtifact {
            schema_version: SCHEMA_VERSION,
            seed: meta.seed,
            family: meta.family.clone(),
            p: meta.p,
            q: meta.q,
            s: meta.s,
            sigma: branch.sigma,
            n: meta.n as u64,
            r: meta.r,
            singular_rule: meta.singular_rule.clone(),
            status: status_name(branch.status).to_string(),
            bracket_low: branch.bracket.0,
            bracket_high: branch.bracket.1,
            records: branch
                .records
                .iter()
                .map(|rec| RecordArtifact {
                    lambda: rec.lambda,
                    gamma: rec.gamma,
                    residual: rec.residual,
                    stability: rec.stability,
                    picard_iters: rec.picard_iters as u64,
                    newton_iters: rec.newton_iters as u64,
                    u: rec.u.values.iter().copied().collect(),
                    v: rec.v.values.iter().copied().collect(),
                })
                .collect(),
        }
    }

    /// Structural validation beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n == 0 {
            return Err(Error::Schema("node count must be positive".into()));
        }
        for (i, rec) in self.records.iter().enumerate() {
            if rec.u.len() != self.n as usize || rec.v.len() != self.n as usize {
                return Err(Error::Schema(format!(
                    "record {i} has {} / {} nodes, expected {}",
                    rec.u.len(),
                    rec.v.len(),
                    self.n
                )));
            }
        }
        self.parse_status()?;
        self.parse_rule()?;
        Ok(())
    }

    pub fn parse_status(&self) -> Result<BranchStatus> {
        match self.status.as_str() {
            "fold_found" => Ok(BranchStatus::FoldFound),
            "step_limit" => Ok(BranchStatus::StepLimit),
            "constraint_hit" => Ok(BranchStatus::ConstraintHit),
            other => Err(Error::Schema(format!("unknown branch status {other:?}"))),
        }
    }

    pub fn parse_rule(&self) -> Result<SingularRule> {
        match self.singular_rule.as_str() {
            "cell_exact" => Ok(SingularRule::CellExact),
            "taylor2" => Ok(SingularRule::Taylor2),
            other => Err(Error::Schema(format!("unknown singular rule {other:?}"))),
        }
    }

    /// Rebuilds the system family this branch was computed on.
    pub fn to_system(&self) -> Result<SystemSpec> {
        let need_p = || {
            self.p.ok_or_else(|| {
                Error::Schema(format!("family {:?} needs the exponent p", self.family))
            })
        };
        match self.family.as_str() {
            "gelfand" => Ok(SystemSpec::gelfand()),
            "lane_emden" => SystemSpec::lane_emden(need_p()?),
            "mems" => SystemSpec::mems(need_p()?),
            "gradient" => {
                let p = need_p()?;
                let q = self.q.ok_or_else(|| {
                    Error::Schema("gradient family needs the exponent q".into())
                })?;
                SystemSpec::gradient_powers(p, q)
            }
            other => Err(Error::Schema(format!("unknown family {other:?}"))),
        }
    }

    /// Reassembles the discrete operator the records were produced on.
    pub fn to_operator(&self) -> Result<DiscreteOperator> {
        let kernel = SpectralKernel::fractional_laplacian(self.s)?;
        let grid = Grid::uniform(self.n as usize, self.r)?;
        assemble(&kernel, &grid, self.parse_rule()?)
    }

    pub fn record_functions(&self, i: usize) -> (GridFunction, GridFunction) {
        let rec = &self.records[i];
        (
            GridFunction::from_values(rec.u.clone()),
            GridFunction::from_values(rec.v.clone()),
        )
    }
}

/// One verified inequality in artifact form.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckArtifact {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub quantities: BTreeMap<String, f64>,
}

impl From<&EstimateReport> for CheckArtifact {
    fn from(r: &EstimateReport) -> Self {
        CheckArtifact {
            name: r.name.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            pass: r.pass,
            quantities: r.quantities.clone(),
        }
    }
}

/// Outcome of a verification run over a branch file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArtifact {
    pub schema_version: u32,
    pub seed: u64,
    pub source: String,
    pub checks: Vec<String>,
    pub all_pass: bool,
    pub reports: Vec<CheckArtifact>,
}

/// Outcome of the randomized pointwise-inequality sampler.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingArtifact {
    pub schema_version: u32,
    pub seed: u64,
    pub samples: u64,
    pub reports: Vec<SamplingEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingEntry {
    pub name: String,
    pub violations: u64,
    pub worst_slack: f64,
    pub witness: Option<Vec<f64>>,
}

impl SamplingArtifact {
    pub fn from_reports(seed: u64, samples: usize, reports: &[InequalityReport]) -> Self {
        SamplingArtifact {
            schema_version: SCHEMA_VERSION,
            seed,
            samples: samples as u64,
            reports: reports
                .iter()
                .map(|r| SamplingEntry {
                    name: r.name.clone(),
                    violations: r.violations as u64,
                    worst_slack: r.worst_slack,
                    witness: r.witness.clone(),
                })
                .collect(),
        }
    }
}

// ---- deterministic JSON emission ----------------------------------------

fn push_f64(out: &mut String, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Schema(format!(
            "non-finite value {x} cannot be serialized"
        )));
    }
    let _ = write!(out, "{x:.16e}");
    Ok(())
}

fn push_str(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_f64_array(out: &mut String, xs: &[f64]) -> Result<()> {
    out.push('[');
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_f64(out, x)?;
    }
    out.push(']');
    Ok(())
}

fn push_opt_f64(out: &mut String, x: Option<f64>) -> Result<()> {
    match x {
        Some(x) => push_f64(out, x),
        None => {
            out.push_str("null");
            Ok(())
        }
    }
}

pub fn branch_to_json(a: &BranchArtifact) -> Result<String> {
    let mut out = String::with_capacity(1 << 16);
    out.push_str("{\n");
    let _ = write!(out, "  \"schema_version\": {},\n", a.schema_version);
    let _ = write!(out, "  \"seed\": {},\n", a.seed);
    out.push_str("  \"family\": ");
    push_str(&mut out, &a.family);
    out.push_str(",\n  \"p\": ");
    push_opt_f64(&mut out, a.p)?;
    out.push_str(",\n  \"q\": ");
    push_opt_f64(&mut out, a.q)?;
    out.push_str(",\n  \"s\": ");
    push_f64(&mut out, a.s)?;
    out.push_str(",\n  \"sigma\": ");
    push_f64(&mut out, a.sigma)?;
    let _ = write!(out, ",\n  \"n\": {},\n  \"r\": ", a.n);
    push_f64(&mut out, a.r)?;
    out.push_str(",\n  \"singular_rule\": ");
    push_str(&mut out, &a.singular_rule);
    out.push_str(",\n  \"status\": ");
    push_str(&mut out, &a.status);
    out.push_str(",\n  \"bracket_low\": ");
    push_f64(&mut out, a.bracket_low)?;
    out.push_str(",\n  \"bracket_high\": ");
    push_opt_f64(&mut out, a.bracket_high)?;
    out.push_str(",\n  \"records\": [");
    for (i, rec) in a.records.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str("    {\"lambda\": ");
        push_f64(&mut out, rec.lambda)?;
        out.push_str(", \"gamma\": ");
        push_f64(&mut out, rec.gamma)?;
        out.push_str(", \"residual\": ");
        push_f64(&mut out, rec.residual)?;
        out.push_str(", \"stability\": ");
        push_f64(&mut out, rec.stability)?;
        let _ = write!(
            out,
            ", \"picard_iters\": {}, \"newton_iters\": {}, \"u\": ",
            rec.picard_iters, rec.newton_iters
        );
        push_f64_array(&mut out, &rec.u)?;
        out.push_str(", \"v\": ");
        push_f64_array(&mut out, &rec.v)?;
        out.push('}');
    }
    out.push_str(if a.records.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    Ok(out)
}

pub fn branch_from_json(text: &str) -> Result<BranchArtifact> {
    let artifact: BranchArtifact =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("branch file: {e}")))?;
    artifact.validate()?;
    Ok(artifact)
}

pub fn verify_to_json(a: &VerifyArtifact) -> Result<String> {
    let mut out = String::with_capacity(1 << 12);
    out.push_str("{\n");
    let _ = write!(out, "  \"schema_version\": {},\n", a.schema_version);
    let _ = write!(out, "  \"seed\": {},\n", a.seed);
    out.push_str("  \"source\": ");
    push_str(&mut out, &a.source);
    out.push_str(",\n  \"checks\": [");
    for (i, c) in a.checks.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_str(&mut out, c);
    }
    let _ = write!(out, "],\n  \"all_pass\": {},\n", a.all_pass);
    out.push_str("  \"reports\": [");
    for (i, r) in a.reports.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str("    {\"name\": ");
        push_str(&mut out, &r.name);
        out.push_str(", \"lhs\": ");
        push_f64(&mut out, r.lhs)?;
        out.push_str(", \"rhs\": ");
        push_f64(&mut out, r.rhs)?;
        out.push_str(", \"slack\": ");
        push_f64(&mut out, r.slack)?;
        let _ = write!(out, ", \"pass\": {}, \"quantities\": {{", r.pass);
        for (j, (k, v)) in r.quantities.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            push_str(&mut out, k);
            out.push_str(": ");
            push_f64(&mut out, *v)?;
        }
        out.push_str("}}");
    }
    out.push_str(if a.reports.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    Ok(out)
}

pub fn verify_from_json(text: &str) -> Result<VerifyArtifact> {
    let artifact: VerifyArtifact =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("verify report: {e}")))?;
    if artifact.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            artifact.schema_version
        )));
    }
    Ok(artifact)
}

pub fn sampling_to_json(a: &SamplingArtifact) -> Result<String> {
    let mut out = String::with_capacity(1 << 10);
    out.push_str("{\n");
    let _ = write!(out, "  \"schema_version\": {},\n", a.schema_version);
    let _ = write!(out, "  \"seed\": {},\n", a.seed);
    let _ = write!(out, "  \"samples\": {},\n", a.samples);
    out.push_str("  \"reports\": [");
    for (i, r) in a.reports.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str("    {\"name\": ");
        push_str(&mut out, &r.name);
        let _ = write!(out, ", \"violations\": {}, \"worst_slack\": ", r.violations);
        push_f64(&mut out, r.worst_slack)?;
        out.push_str(", \"witness\": ");
        match &r.witness {
            Some(w) => push_f64_array(&mut out, w)?,
            None => out.push_str("null"),
        }
        out.push('}');
    }
    out.push_str(if a.reports.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    Ok(out)
}

pub fn sampling_from_json(text: &str) -> Result<SamplingArtifact> {
    let artifact: SamplingArtifact =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("sampling report: {e}")))?;
    if artifact.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            artifact.schema_version
        )));
    }
    Ok(artifact)
}

/// CSV plot table for a branch: one row per record, documented columns.
pub fn branch_to_csv(a: &BranchArtifact) -> Result<String> {
    let mut out = String::from("lambda,gamma,sup_u,sup_v,stability,residual\n");
    for rec in &a.records {
        let sup = |xs: &[f64]| xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        for (i, x) in [
            rec.lambda,
            rec.gamma,
            sup(&rec.u),
            sup(&rec.v),
            rec.stability,
            rec.residual,
        ]
        .into_iter()
        .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            push_f64(&mut out, x)?;
        }
        out.push('\n');
    }
    Ok(out)
}
