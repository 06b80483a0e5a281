//! Report sections and their text, JSON and CSV renderings.
//!
//! JSON floats use serde_json's shortest round-trip form, so every number
//! parses back to the identical `f64`. Object keys follow struct field order.

use serde::Serialize;
use std::fmt::Write as _;

use crate::disturbance::DisturbanceReport;
use crate::lhv::{Explanation, ModelReport};
use crate::measurement::OutcomeTuple;

pub const SCHEMA_VERSION: &str = "1.0";

/// Recomputed predictions must match the stored value this closely.
pub const PREDICTION_TOLERANCE: f64 = 1e-12;

/// Width of the acceptance band for sampled counts, in standard deviations.
pub const SAMPLING_SIGMAS: f64 = 4.0;

const FRACTION_TOLERANCE: f64 = 1e-12;
const MAX_DENOMINATOR: u64 = 64;

/// `p` as a reduced fraction when it lies within 1e-12 of `k/64` for an
/// integer `k`.
pub fn exact_fraction(p: f64) -> Option<String> {
    let scaled = p * MAX_DENOMINATOR as f64;
    let k = scaled.round();
    if (p - k / MAX_DENOMINATOR as f64).abs() > FRACTION_TOLERANCE {
        return None;
    }
    let neg = k < 0.0;
    let mut num = k.abs() as u64;
    let mut den = MAX_DENOMINATOR;
    while num.is_multiple_of(2) && den > 1 {
        num /= 2;
        den /= 2;
    }
    if num == 0 {
        return Some("0".into());
    }
    let sign = if neg { "-" } else { "" };
    Some(if den == 1 {
        format!("{sign}{num}")
    } else {
        format!("{sign}{num}/{den}")
    })
}

/// Decimal followed by the exact fraction when there is one, e.g. `0.125 (1/8)`.
pub fn prob_text(p: f64) -> String {
    match exact_fraction(p) {
        Some(f) if f != p.to_string() => format!("{p} ({f})"),
        _ => p.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Scenario,
    Lhv,
    Disturb,
    Sample,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: Command,
    pub scenario: String,
    pub sections: Sections,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(command: Command, scenario: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            scenario: scenario.to_string(),
            sections: Sections::default(),
            metadata: Metadata::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Sections {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<AmplitudeEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantities: Option<Vec<QuantityEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_table: Option<Vec<PredictionEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_report: Option<ModelSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Explanation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit_table: Option<Vec<AuditRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance_reports: Option<Vec<DisturbanceReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<Check>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
    pub tolerances: Tolerances,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            seed: None,
            sample_size: None,
            tolerances: Tolerances {
                prediction: PREDICTION_TOLERANCE,
                null_probability: crate::measurement::NULL_PROBABILITY,
                fraction: FRACTION_TOLERANCE,
                sampling_sigmas: SAMPLING_SIGMAS,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub prediction: f64,
    pub null_probability: f64,
    pub fraction: f64,
    pub sampling_sigmas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeEntry {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityEntry {
    pub name: String,
    pub owner: String,
    pub observable: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionEntry {
    pub name: String,
    pub event: String,
    pub stored: f64,
    pub computed: f64,
    pub exact: Option<String>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSection {
    pub context: Vec<String>,
    pub entries: Vec<DistributionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionEntry {
    pub outcomes: OutcomeTuple,
    pub probability: f64,
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSection {
    pub constraints: Vec<String>,
    pub event: Option<String>,
    pub report: ModelReport,
    /// Each model as `NAME=±1` pairs in quantity order.
    pub models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub context: String,
    pub quantity: String,
    pub observable: String,
    pub commutes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSection {
    pub context: Vec<String>,
    pub entries: Vec<SampleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleEntry {
    pub outcomes: OutcomeTuple,
    pub count: u64,
    pub expected: f64,
    pub sigma: f64,
    pub z: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let s = &report.sections;
    let _ = writeln!(out, "{} {}", report.command_name(), report.scenario);

    if let Some(state) = &s.state {
        let _ = writeln!(out, "\nstate");
        for a in state {
            if a.im.abs() < 1e-15 {
                let _ = writeln!(out, "  {:+.6} {}", a.re, a.basis);
            } else {
                let _ = writeln!(out, "  {:+.6}{:+.6}i {}", a.re, a.im, a.basis);
            }
        }
    }
    if let Some(qs) = &s.quantities {
        let _ = writeln!(out, "\nobservables");
        for q in qs {
            let _ = writeln!(out, "  {:<8} {:<8} {}", q.name, q.owner, q.observable);
        }
    }
    if let Some(rows) = &s.prediction_table {
        let _ = writeln!(out, "\npredictions");
        for r in rows {
            let _ = writeln!(
                out,
                "  {} {:<12} {}  stored {}  computed {}  deviation {:.1e}",
                if r.pass { "ok  " } else { "FAIL" },
                r.name,
                r.event,
                prob_text(r.stored),
                prob_text(r.computed),
                r.deviation
            );
        }
    }
    if let Some(d) = &s.distribution {
        let _ = writeln!(out, "\ndistribution over ({})", d.context.join(", "));
        for e in &d.entries {
            let _ = writeln!(out, "  {}  {}", e.outcomes, prob_text(e.probability));
        }
    }
    if let Some(m) = &s.model_report {
        let _ = writeln!(out, "\nconstraints");
        for c in &m.constraints {
            let _ = writeln!(out, "  {c}");
        }
        if let Some(e) = &m.event {
            let _ = writeln!(out, "  event: {e}");
        }
        let r = &m.report;
        let _ = writeln!(out, "\nquantities: {}", r.quantities.join(" "));
        let _ = writeln!(out, "searched: {}", r.searched);
        let _ = writeln!(out, "models: {}", r.models.len());
        let _ = writeln!(out, "contradiction: {}", r.contradiction);
        let _ = writeln!(out, "mixes incompatible contexts: {}", r.mixes_incompatible_contexts);
        for model in &m.models {
            let _ = writeln!(out, "  {model}");
        }
    }
    if let Some(x) = &s.explanation {
        let _ = writeln!(out, "\nminimal contradiction ({})", if x.verified { "verified" } else { "unverified" });
        for text in &x.core_text {
            let _ = writeln!(out, "  {text}");
        }
        for step in &x.steps {
            let _ = writeln!(out, "  {step}");
        }
    }
    if let Some(rows) = &s.audit_table {
        let _ = writeln!(out, "\ncommutation audit");
        for r in rows {
            let _ = writeln!(
                out,
                "  {:<14} {:<6} vs {:<8} {}",
                r.context,
                r.quantity,
                r.observable,
                if r.commutes { "commutes" } else { "does not commute" }
            );
        }
    }
    if let Some(reports) = &s.disturbance_reports {
        let _ = writeln!(out, "\ndisturbance");
        for r in reports {
            let _ = writeln!(out, "  {}", r.prediction);
            let _ = writeln!(out, "    before {}  after {}", prob_text(r.p_before), prob_text(r.p_after));
            let _ = writeln!(out, "    {}", r.ordering);
            for b in &r.branches {
                let _ = writeln!(
                    out,
                    "    ({}) = {}  weight {}  target {}",
                    r.stage_labels.join(","),
                    b.outcomes,
                    prob_text(b.probability),
                    prob_text(b.target_probability)
                );
            }
        }
    }
    if let Some(smp) = &s.samples {
        let _ = writeln!(out, "\nsamples over ({})", smp.context.join(", "));
        if let (Some(n), Some(seed)) = (report.metadata.sample_size, report.metadata.seed) {
            let _ = writeln!(out, "  n = {n}, seed = {seed}");
        }
        for e in &smp.entries {
            let _ = writeln!(
                out,
                "  {}  count {}  expected {}  z {:+.3}  {}",
                e.outcomes,
                e.count,
                e.expected,
                e.z,
                if e.within { "ok" } else { "OUTSIDE" }
            );
        }
    }
    if let Some(checks) = &s.checks {
        let _ = writeln!(out);
        for c in checks {
            let _ = writeln!(out, "{}", c.line());
        }
    }
    out
}

impl Report {
    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Scenario => "scenario",
            Command::Lhv => "lhv",
            Command::Disturb => "disturb",
            Command::Sample => "sample",
            Command::Verify => "verify",
        }
    }
}

/// The command's main table as CSV.
pub fn render_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let s = &report.sections;
    let mut write = |rec: Vec<String>| w.write_record(&rec).expect("in-memory write");
    let opt = |o: &Option<String>| o.clone().unwrap_or_default();
    match report.command {
        Command::Scenario => {
            write(vec!["name", "event", "stored", "computed", "exact", "deviation", "pass"].into_iter().map(String::from).collect());
            for r in s.prediction_table.iter().flatten() {
                write(vec![
                    r.name.clone(),
                    r.event.clone(),
                    r.stored.to_string(),
                    r.computed.to_string(),
                    opt(&r.exact),
                    r.deviation.to_string(),
                    r.pass.to_string(),
                ]);
            }
        }
        Command::Lhv => {
            let names = s
                .model_report
                .as_ref()
                .map(|m| m.report.quantities.clone())
                .unwrap_or_default();
            write(names.clone());
            for m in s.model_report.iter().flat_map(|m| &m.report.models) {
                write(names.iter().map(|n| m.get(n).map(|o| o.to_string()).unwrap_or_default()).collect());
            }
        }
        Command::Disturb => {
            write(vec!["prediction", "p_before", "p_after", "given_probability", "branches", "ordering"].into_iter().map(String::from).collect());
            for r in s.disturbance_reports.iter().flatten() {
                write(vec![
                    r.prediction.clone(),
                    r.p_before.to_string(),
                    r.p_after.to_string(),
                    r.given_probability.to_string(),
                    r.branches.len().to_string(),
                    r.ordering.clone(),
                ]);
            }
        }
        Command::Sample => {
            write(vec!["outcomes", "count", "expected", "sigma", "z", "within"].into_iter().map(String::from).collect());
            for e in s.samples.iter().flat_map(|x| &x.entries) {
                write(vec![
                    e.outcomes.to_string(),
                    e.count.to_string(),
                    e.expected.to_string(),
                    e.sigma.to_string(),
                    e.z.to_string(),
                    e.within.to_string(),
                ]);
            }
        }
        Command::Verify => {
            write(vec!["check".into(), "status".into(), "detail".into()]);
            for c in s.checks.iter().flatten() {
                write(vec![
                    c.name.clone(),
                    if c.pass { "PASS" } else { "FAIL" }.into(),
                    c.detail.clone(),
                ]);
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(exact_fraction(0.125).as_deref(), Some("1/8"));
        assert_eq!(exact_fraction(0.25 + 1e-13).as_deref(), Some("1/4"));
        assert_eq!(exact_fraction(1.0).as_deref(), Some("1"));
        assert_eq!(exact_fraction(0.0).as_deref(), Some("0"));
        assert_eq!(exact_fraction(3.0 / 64.0).as_deref(), Some("3/64"));
        assert_eq!(exact_fraction(1.0 / 128.0), None);
        assert_eq!(exact_fraction(0.0901699437494742), None);
        assert_eq!(prob_text(0.5), "0.5 (1/2)");
        assert_eq!(prob_text(1.0), "1");
    }
}
