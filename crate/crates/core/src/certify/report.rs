//! Report records, verdict logic and the text/JSON emitters.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::residual::Residual;

/// Version of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Sanity,
    Fluid,
    Hypotheses,
    Conclusions,
    Ladder,
    Converse,
    Physics,
}

impl Group {
    pub const ALL: [Group; 7] = [
        Group::Sanity,
        Group::Fluid,
        Group::Hypotheses,
        Group::Conclusions,
        Group::Ladder,
        Group::Converse,
        Group::Physics,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Sanity => "sanity",
            Group::Fluid => "fluid",
            Group::Hypotheses => "hypotheses",
            Group::Conclusions => "conclusions",
            Group::Ladder => "ladder",
            Group::Converse => "converse",
            Group::Physics => "physics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Evaluated, but a premise failed, so the outcome carries no weight.
    Informational,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
            Status::Informational => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub group: Group,
    pub anchor: &'static str,
    pub status: Status,
    /// Counts towards the verdict unless skipped or informational.
    pub required: bool,
    pub tolerance: f64,
    /// Worst scale-free residual over the sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_tolerance: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl CheckRecord {
    pub fn measured(
        name: impl Into<String>,
        group: Group,
        anchor: &'static str,
        residual: Residual,
        tolerance: f64,
    ) -> Self {
        let ok = residual.scaled() < tolerance;
        Self {
            name: name.into(),
            group,
            anchor,
            status: if ok { Status::Pass } else { Status::Fail },
            required: true,
            tolerance,
            residual: Some(residual.scaled()),
            residual_abs: Some(residual.abs),
            within_tolerance: Some(ok),
            worst_point: None,
            skipped_reason: None,
            detail: None,
        }
    }

    /// A yes/no check without a numeric residual.
    pub fn judged(name: impl Into<String>, group: Group, anchor: &'static str, ok: bool, tolerance: f64) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            residual_abs: None,
            within_tolerance: Some(ok),
            ..Self::measured(name, group, anchor, Residual::zero(), tolerance)
        }
    }

    pub fn skipped(name: impl Into<String>, group: Group, anchor: &'static str, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            group,
            anchor,
            status: Status::Skipped,
            required: true,
            tolerance: 0.0,
            residual: None,
            residual_abs: None,
            within_tolerance: None,
            worst_point: None,
            skipped_reason: Some(reason.into()),
            detail: None,
        }
    }

    pub fn at(mut self, point: Option<&[f64]>) -> Self {
        self.worst_point = point.map(<[f64]>::to_vec);
        self
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn optional(mut self) -> Self {
        self.required = false;
        if self.status != Status::Skipped {
            self.status = Status::Informational;
        }
        self
    }

    pub fn downgrade(&mut self) {
        if matches!(self.status, Status::Pass | Status::Fail) {
            self.status = Status::Informational;
        }
    }

    pub fn counts(&self) -> bool {
        self.required && matches!(self.status, Status::Pass | Status::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricIdentity {
    pub name: String,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    pub warped_product: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub points: usize,
    pub hypothesis_tol: f64,
    pub conclusion_tol: f64,
    pub cluster_tol: f64,
    pub kappa: f64,
    pub basepoint: Vec<f64>,
    pub selection: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub schema: u32,
    pub metric: MetricIdentity,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    /// Fluid form, unit closed velocity and vanishing Weyl divergence all held.
    pub hypotheses_hold: bool,
    pub conclusions_informational: bool,
    pub verdict: Verdict,
}

impl CertificationReport {
    pub fn verdict_of(checks: &[CheckRecord]) -> Verdict {
        if checks.iter().filter(|c| c.counts()).all(|c| c.status == Status::Pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with lexicographically ordered keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is plain data");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let env = &self.environment;
        let _ = writeln!(
            out,
            "metric {} (n = {}), {} points, seed {}",
            self.metric.name, self.metric.dimension, env.points, env.seed
        );
        let _ = writeln!(
            out,
            "tolerances: hypothesis {:e}, conclusion {:e}, cluster {:e}",
            env.hypothesis_tol, env.conclusion_tol, env.cluster_tol
        );
        let mut group = None;
        for c in &self.checks {
            if group != Some(c.group) {
                group = Some(c.group);
                let _ = writeln!(out, "\n[{}]", c.group.as_str());
            }
            let value = match (c.residual, &c.skipped_reason) {
                (_, Some(reason)) => format!("skipped: {reason}"),
                (Some(r), None) => format!("{r:.3e} (tol {:.1e})", c.tolerance),
                (None, None) => String::new(),
            };
            let _ = writeln!(out, "  {} {:<36} {:<28} {}", c.status.label(), c.name, value, c.anchor);
        }
        if self.conclusions_informational {
            let _ = writeln!(out, "\nhypotheses failed: conclusion checks are informational");
        }
        let _ = writeln!(
            out,
            "\nverdict: {}",
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            }
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

pub fn emit_report(report: &CertificationReport, format: ReportFormat, path: &Path) -> std::io::Result<()> {
    let body = match format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    std::fs::write(path, body)
}
