//! Seeded experiment runners, the parallel batch driver and output layout.
//!
//! A batch is every (condition, seed) pair of one [`ExperimentConfig`]. Runs
//! are independent and internally sequential, so they execute on a worker
//! pool and are gathered back in (condition, seed) order before anything is
//! aggregated or written.

pub mod config;
pub mod entrain;
pub mod heredity;
pub mod output;
pub mod rng;
pub mod scan;
pub mod search;
pub mod selection;
pub mod world;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind};
pub use output::{Contrast, ExperimentSummary, RunOutput};
pub use world::World;

use crate::analysis::{fisher_mean, kaplan_meier};
use crate::error::{Error, Result};

/// All runs of a batch plus their aggregate.
#[derive(Clone, Debug)]
pub struct BatchResult {
    pub runs: Vec<RunOutput>,
    pub summary: ExperimentSummary,
}

/// One (condition, seed) run. `world` is required for the landscape assays.
pub fn run_one(cfg: &ExperimentConfig, world: Option<&World>, condition: &str, seed: u64) -> Result<RunOutput> {
    let need = || world.ok_or_else(|| Error::Config("this experiment needs a landscape".into()));
    match cfg.experiment {
        ExperimentKind::Scan => scan::run_scan(cfg, condition, seed),
        ExperimentKind::Search => search::run_search(cfg, need()?, condition, seed),
        ExperimentKind::Selection => selection::run_selection(cfg, need()?, condition, seed),
        ExperimentKind::Heredity => heredity::run_heredity(cfg, need()?, condition, seed),
        ExperimentKind::Entrain => entrain::run_entrain(cfg, condition, seed),
    }
}

/// Runs the whole batch on `threads` workers (0 = rayon's default).
pub fn run_batch(cfg: &ExperimentConfig, threads: usize) -> Result<BatchResult> {
    cfg.validate()?;
    let world = match cfg.experiment {
        ExperimentKind::Search | ExperimentKind::Selection | ExperimentKind::Heredity => Some(World::build(cfg)?),
        _ => None,
    };
    let jobs: Vec<(&str, u64)> = cfg
        .conditions
        .iter()
        .flat_map(|c| cfg.seeds.iter().map(move |&s| (c.as_str(), s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    let runs: Vec<RunOutput> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, s)| run_one(cfg, world.as_ref(), c, s))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(cfg, &runs);
    Ok(BatchResult { runs, summary })
}

fn contrasts(table: &output::Table, pairs: &[(&str, &str, &str)]) -> Vec<Contrast> {
    pairs
        .iter()
        .filter_map(|&(m, a, b)| output::contrast(table, m, a, b))
        .collect()
}

fn runs_of<'a>(runs: &'a [RunOutput], condition: &'a str) -> impl Iterator<Item = &'a RunOutput> + 'a {
    runs.iter().filter(move |r| r.condition == condition)
}

/// Element-wise mean of one numeric array field across a condition's runs.
fn mean_course(runs: &[RunOutput], condition: &str, pick: impl Fn(&Value) -> Vec<f64>) -> Vec<f64> {
    let courses: Vec<Vec<f64>> = runs_of(runs, condition).map(|r| pick(&r.summary)).collect();
    let len = courses.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|k| courses.iter().map(|c| c[k]).sum::<f64>() / courses.len() as f64)
        .collect()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .map(|a| a.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default()
}

pub fn summarize(cfg: &ExperimentConfig, runs: &[RunOutput]) -> ExperimentSummary {
    let table = output::tabulate(runs, &cfg.seeds);
    let has = |c: &str| cfg.conditions.iter().any(|x| x == c);
    let (contrasts, extra) = match cfg.experiment {
        ExperimentKind::Scan => (vec![], json!({})),
        ExperimentKind::Search => {
            let c = contrasts(
                &table,
                &[
                    ("entropy", "local-search", "random-walk"),
                    ("unique_bins", "local-search", "random-walk"),
                    ("ji", "local-search", "random-walk"),
                    ("g_gain", "local-search", "random-walk"),
                    ("entropy", "shuffled-landscape", "local-search"),
                    ("nn_spacing_ct", "shuffled-landscape", "local-search"),
                    ("unique_bins", "consonance-only", "local-search"),
                ],
            );
            let g: serde_json::Map<String, Value> = cfg
                .conditions
                .iter()
                .map(|cond| {
                    let course = mean_course(runs, cond, |s| {
                        s["sweeps"].as_array().map(|a| a.iter().filter_map(|x| x["g"].as_f64()).collect()).unwrap_or_default()
                    });
                    (cond.clone(), json!(course))
                })
                .collect();
            (c, json!({ "mean_g_by_sweep": g }))
        }
        ExperimentKind::Selection => {
            let c = contrasts(&table, &[("r", "recharge-on", "recharge-off")]);
            let mut extra = serde_json::Map::new();
            for cond in &cfg.conditions {
                let rs: Vec<f64> = runs_of(runs, cond).filter_map(|r| r.metric("r")).collect();
                let degenerate = runs_of(runs, cond).filter(|r| r.summary["r_degenerate"] == json!(true)).count();
                let pooled = |key: &str| -> Vec<f64> { runs_of(runs, cond).flat_map(|r| floats(&r.summary[key])).collect() };
                let (high, low) = (pooled("high_split_lifetimes"), pooled("low_split_lifetimes"));
                let med = |v: &[f64]| kaplan_meier(v).ok().map(|k| k.median);
                let (_, fr) = fisher_mean(&rs);
                extra.insert(
                    cond.clone(),
                    json!({
                        "fisher_mean_r": if rs.is_empty() { None } else { Some(fr) },
                        "degenerate_seeds": degenerate,
                        "pooled_median_high": med(&high),
                        "pooled_median_low": med(&low),
                        "pooled_n_high": high.len(),
                        "pooled_n_low": low.len(),
                    }),
                );
            }
            (c, Value::Object(extra))
        }
        ExperimentKind::Heredity => {
            let mut pairs = Vec::new();
            for m in ["final_c_score", "entropy", "ji", "unique_bins", "auc_c"] {
                pairs.push((m, "heredity+selection", "random+selection"));
            }
            for m in ["final_c_score", "auc_c"] {
                pairs.push((m, "heredity-only", "random-only"));
            }
            let c = contrasts(&table, &pairs);
            let crossings: serde_json::Map<String, Value> = cfg
                .conditions
                .iter()
                .map(|cond| {
                    let n = runs_of(runs, cond).filter(|r| r.metric("ji_crossed") == Some(1.0)).count();
                    (cond.clone(), json!(n))
                })
                .collect();
            (c, json!({ "ji_crossing_seeds": crossings }))
        }
        ExperimentKind::Entrain => {
            let mut pairs = Vec::new();
            for (a, b) in [("shared", "scrambled"), ("scrambled", "off"), ("shared", "off")] {
                if has(a) && has(b) {
                    pairs.push(("vector_strength", a, b));
                }
            }
            let c = contrasts(&table, &pairs);
            let plv: serde_json::Map<String, Value> = cfg
                .conditions
                .iter()
                .map(|cond| (cond.clone(), json!(mean_course(runs, cond, |s| floats(&s["plv_course"])))))
                .collect();
            (c, json!({ "mean_plv_course": plv }))
        }
    };
    ExperimentSummary {
        experiment: cfg.experiment.name().to_string(),
        seeds: cfg.seeds.clone(),
        conditions: table,
        contrasts,
        extra,
    }
}

/// `<root>/<experiment>`.
pub fn experiment_dir(root: &Path, kind: ExperimentKind) -> PathBuf {
    root.join(kind.name())
}

/// Writes run directories, the experiment summary and a manifest.
/// Nothing written depends on wall-clock time or thread count.
pub fn write_batch(cfg: &ExperimentConfig, batch: &BatchResult, root: &Path, overrides: &[String]) -> Result<PathBuf> {
    let dir = experiment_dir(root, cfg.experiment);
    for run in &batch.runs {
        let rd = dir.join(&run.condition).join(run.seed.to_string());
        fs::create_dir_all(&rd)?;
        fs::write(rd.join("summary.json"), to_pretty(&run.summary)?)?;
        for (name, bytes) in &run.files {
            fs::write(rd.join(name), bytes)?;
        }
    }
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("summary.json"), to_pretty(&serde_json::to_value(&batch.summary)?)?)?;
    let manifest = json!({
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "overrides": overrides,
        "config": cfg,
    });
    fs::write(dir.join("manifest.json"), to_pretty(&manifest)?)?;
    Ok(dir)
}

fn to_pretty(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Loads a previously written experiment summary.
pub fn read_summary(dir: &Path) -> Result<ExperimentSummary> {
    let text = fs::read_to_string(dir.join("summary.json"))?;
    Ok(serde_json::from_str(&text)?)
}
