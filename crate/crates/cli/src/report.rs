//! Reproduction report: stored experiment summaries checked against a table
//! of reference targets shipped as data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sonic_ecology::analysis::welch_t;
use sonic_ecology::experiments::{read_summary, ExperimentSummary};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TARGETS_JSON: &str = include_str!("../targets.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Check {
    Lt { value: f64 },
    Gt { value: f64 },
    AbsLt { value: f64 },
    Between { lo: f64, hi: f64 },
    /// Mean above another condition's (or metric's, or extra value's).
    Above {
        #[serde(flatten)]
        other: Other,
        #[serde(default)]
        by: Option<f64>,
        #[serde(default)]
        factor: Option<f64>,
        #[serde(default)]
        p_below: Option<f64>,
    },
    Below {
        #[serde(flatten)]
        other: Other,
        #[serde(default)]
        p_below: Option<f64>,
    },
    Equal {
        #[serde(flatten)]
        other: Other,
    },
    OrderingsOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Other {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_extra: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: u32,
    pub experiment: String,
    pub condition: String,
    pub metric: String,
    /// JSON pointer into the summary's `extra` block, for aggregate values.
    #[serde(default)]
    pub extra: Option<String>,
    pub reference: Option<f64>,
    pub note: String,
    pub check: Check,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TargetTable {
    pub schema_version: u32,
    pub targets: Vec<Target>,
}

pub fn targets() -> Result<TargetTable> {
    Ok(serde_json::from_str(TARGETS_JSON)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    OrderingsOnly,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub criterion: u32,
    pub condition: String,
    pub metric: String,
    pub reference: Option<f64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub compared_to: Option<f64>,
    pub p: Option<f64>,
    pub verdict: Verdict,
    pub rule: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }
}

/// Checks that every (condition, seed) run directory has its summary.
pub fn missing_runs(dir: &Path, summary: &ExperimentSummary) -> Vec<String> {
    let mut out = Vec::new();
    for cond in summary.conditions.keys() {
        for seed in &summary.seeds {
            if !dir.join(cond).join(seed.to_string()).join("summary.json").is_file() {
                out.push(format!("{cond}/{seed}"));
            }
        }
    }
    out
}

pub fn load(dir: &Path) -> Result<ExperimentSummary> {
    if !dir.join("summary.json").is_file() {
        bail!("no summary.json in {}", dir.display());
    }
    let summary = read_summary(dir).with_context(|| format!("reading {}", dir.display()))?;
    let missing = missing_runs(dir, &summary);
    if !missing.is_empty() {
        bail!("missing run summaries: {}", missing.join(", "));
    }
    Ok(summary)
}

fn values(s: &ExperimentSummary, cond: &str, metric: &str) -> Option<(Option<f64>, Option<f64>, Vec<f64>)> {
    let m = s.metric(cond, metric)?;
    Some((m.mean, m.sd, m.present()))
}

fn extra(s: &ExperimentSummary, ptr: &str) -> Option<f64> {
    s.extra.pointer(ptr).and_then(Value::as_f64)
}

pub fn build_report(summary: &ExperimentSummary, table: &TargetTable) -> Report {
    let mut rows = Vec::new();
    for t in table.targets.iter().filter(|t| t.experiment == summary.experiment) {
        if !summary.conditions.contains_key(&t.condition) {
            continue;
        }
        let (mean, sd, own) = match &t.extra {
            Some(p) => (extra(summary, p), None, vec![]),
            None => values(summary, &t.condition, &t.metric).unwrap_or((None, None, vec![])),
        };
        let other_of = |o: &Other| -> (Option<f64>, Vec<f64>) {
            if let Some(p) = &o.other_extra {
                (extra(summary, p), vec![])
            } else if let Some(m) = &o.other_metric {
                values(summary, &t.condition, m).map(|v| (v.0, v.2)).unwrap_or_default()
            } else if let Some(c) = &o.other {
                values(summary, c, &t.metric).map(|v| (v.0, v.2)).unwrap_or_default()
            } else {
                (None, vec![])
            }
        };
        let p_of = |b: &[f64]| welch_t(&own, b).map(|w| w.p);
        let (verdict, compared_to, p, rule) = match (&t.check, mean) {
            (Check::OrderingsOnly, _) => (Verdict::OrderingsOnly, None, None, "reported only".to_string()),
            (_, None) => (Verdict::Fail, None, None, "value missing".to_string()),
            (Check::Lt { value }, Some(m)) => (ok(m < *value), None, None, format!("< {value}")),
            (Check::Gt { value }, Some(m)) => (ok(m > *value), None, None, format!("> {value}")),
            (Check::AbsLt { value }, Some(m)) => (ok(m.abs() < *value), None, None, format!("|x| < {value}")),
            (Check::Between { lo, hi }, Some(m)) => (ok(*lo <= m && m <= *hi), None, None, format!("in [{lo}, {hi}]")),
            (Check::Above { other, by, factor, p_below }, Some(m)) => {
                let (om, ov) = other_of(other);
                let p = p_below.and_then(|_| p_of(&ov));
                let pass = om.is_some_and(|o| {
                    let lvl = match (by, factor) {
                        (Some(b), _) => o + b,
                        (None, Some(f)) => o * f,
                        _ => o,
                    };
                    m > lvl && p_below.is_none_or(|lim| p.is_some_and(|p| p < lim))
                });
                let mut rule = format!("> {}", describe(other, *by, *factor));
                if let Some(l) = p_below {
                    let _ = write!(rule, ", p < {l}");
                }
                (ok(pass), om, p, rule)
            }
            (Check::Below { other, p_below }, Some(m)) => {
                let (om, ov) = other_of(other);
                let p = p_below.and_then(|_| p_of(&ov));
                let pass = om.is_some_and(|o| m < o && p_below.is_none_or(|lim| p.is_some_and(|p| p < lim)));
                let mut rule = format!("< {}", describe(other, None, None));
                if let Some(l) = p_below {
                    let _ = write!(rule, ", p < {l}");
                }
                (ok(pass), om, p, rule)
            }
            (Check::Equal { other }, Some(m)) => {
                let (om, _) = other_of(other);
                (ok(om == Some(m)), om, None, format!("= {}", describe(other, None, None)))
            }
        };
        rows.push(ReportRow {
            criterion: t.id,
            condition: t.condition.clone(),
            metric: t.metric.clone(),
            reference: t.reference,
            mean,
            sd,
            compared_to,
            p,
            verdict,
            rule,
            note: t.note.clone(),
        });
    }
    Report {
        schema_version: REPORT_SCHEMA_VERSION,
        experiment: summary.experiment.clone(),
        seeds: summary.seeds.clone(),
        rows,
    }
}

fn ok(b: bool) -> Verdict {
    if b {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn describe(o: &Other, by: Option<f64>, factor: Option<f64>) -> String {
    let base = o
        .other
        .clone()
        .or_else(|| o.other_metric.clone())
        .or_else(|| o.other_extra.clone())
        .unwrap_or_default();
    match (by, factor) {
        (Some(b), _) => format!("{base} + {b}"),
        (None, Some(f)) => format!("{f} x {base}"),
        _ => base,
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

/// Plain-text table, one sub-table per condition.
pub fn render(report: &Report) -> String {
    let mut by_cond: BTreeMap<&str, Vec<&ReportRow>> = BTreeMap::new();
    for r in &report.rows {
        by_cond.entry(&r.condition).or_default().push(r);
    }
    let mut out = format!("{} ({} seeds)\n", report.experiment, report.seeds.len());
    for (cond, rows) in by_cond {
        let _ = writeln!(out, "\n[{cond}]");
        let _ = writeln!(
            out,
            "{:<4} {:<20} {:>10} {:>10} {:>9} {:>10} {:>10}  {:<15} rule",
            "crit", "metric", "reference", "mean", "sd", "vs", "p", "verdict"
        );
        for r in rows {
            let verdict = match r.verdict {
                Verdict::Pass => "pass",
                Verdict::OrderingsOnly => "orderings-only",
                Verdict::Fail => "FAIL",
            };
            let p = r.p.map(|p| format!("{p:.2e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<4} {:<20} {:>10} {:>10} {:>9} {:>10} {:>10}  {:<15} {}",
                r.criterion,
                r.metric,
                fmt(r.reference),
                fmt(r.mean),
                fmt(r.sd),
                fmt(r.compared_to),
                p,
                verdict,
                r.rule
            );
        }
    }
    out
}
