//! Per-run results and the experiment-level summary document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{welch_t, MetricSummary, Welch};

/// Everything one (condition, seed) run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub condition: String,
    pub seed: u64,
    /// Named scalar outcomes; `None` where a metric is undefined for this run.
    pub metrics: Vec<(String, Option<f64>)>,
    /// Per-run summary.json contents.
    pub summary: Value,
    /// Extra files for the run directory, written verbatim.
    pub files: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).and_then(|(_, v)| *v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub metric: String,
    pub a: String,
    pub b: String,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub welch: Option<Welch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub seeds: Vec<u64>,
    /// condition -> metric -> per-seed summary
    pub conditions: Table,
    pub contrasts: Vec<Contrast>,
    /// Experiment-specific extras (pooled survival curves, trajectories, ...).
    pub extra: Value,
}

impl ExperimentSummary {
    pub fn metric(&self, condition: &str, metric: &str) -> Option<&MetricSummary> {
        self.conditions.get(condition)?.get(metric)
    }

    pub fn contrast(&self, metric: &str, a: &str, b: &str) -> Option<&Contrast> {
        self.contrasts
            .iter()
            .find(|c| c.metric == metric && c.a == a && c.b == b)
    }
}

pub type Table = BTreeMap<String, BTreeMap<String, MetricSummary>>;

/// Groups run metrics by condition in seed order.
pub fn tabulate(runs: &[RunOutput], seeds: &[u64]) -> Table {
    let mut out: BTreeMap<String, BTreeMap<String, Vec<Option<f64>>>> = BTreeMap::new();
    for &seed in seeds {
        for r in runs.iter().filter(|r| r.seed == seed) {
            let slot = out.entry(r.condition.clone()).or_default();
            for (k, v) in &r.metrics {
                slot.entry(k.clone()).or_default().push(*v);
            }
        }
    }
    out.into_iter()
        .map(|(c, m)| (c, m.into_iter().map(|(k, v)| (k, MetricSummary::new(v))).collect()))
        .collect()
}

pub fn contrast(
    table: &Table,
    metric: &str,
    a: &str,
    b: &str,
) -> Option<Contrast> {
    let sa = table.get(a)?.get(metric)?;
    let sb = table.get(b)?.get(metric)?;
    Some(Contrast {
        metric: metric.to_string(),
        a: a.to_string(),
        b: b.to_string(),
        mean_a: sa.mean,
        mean_b: sb.mean,
        welch: welch_t(&sa.present(), &sb.present()),
    })
}
