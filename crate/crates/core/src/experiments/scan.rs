//! Single-anchor scan as an experiment run.

use serde_json::json;

use super::config::ExperimentConfig;
use super::output::RunOutput;
use crate::error::Result;
use crate::landscape::{single_anchor_scan, write_scan_csv, ScanRow};

/// Bin of the largest value within `±window_ct` of `target_ct`, if that bin
/// is a local maximum of the whole column.
pub fn peak_near(rows: &[ScanRow], value: impl Fn(&ScanRow) -> f64, target_ct: f64, window_ct: f64) -> Option<f64> {
    let k = (1..rows.len().saturating_sub(1))
        .filter(|&k| (rows[k].cents - target_ct).abs() <= window_ct)
        .max_by(|&a, &b| value(&rows[a]).total_cmp(&value(&rows[b])))?;
    let v = value(&rows[k]);
    (v > value(&rows[k - 1]) && v > value(&rows[k + 1])).then_some(rows[k].cents)
}

pub fn run_scan(cfg: &ExperimentConfig, condition: &str, seed: u64) -> Result<RunOutput> {
    let rows = single_anchor_scan(cfg.anchor_hz, cfg.band_oct, &cfg.timbre, &cfg.harmonicity)?;
    let mut csv = Vec::new();
    write_scan_csv(&rows, &mut csv)?;
    let at = |ct: f64| {
        rows.iter()
            .min_by(|a, b| (a.cents - ct).abs().total_cmp(&(b.cents - ct).abs()))
            .map(|r| r.c_field)
    };
    let cf = |r: &ScanRow| r.c_field;
    let metrics = vec![
        ("rows".to_string(), Some(rows.len() as f64)),
        ("c_field_702".to_string(), at(702.0)),
        ("c_field_600".to_string(), at(600.0)),
        ("c_field_1200".to_string(), at(1200.0)),
        ("c_field_1100".to_string(), at(1100.0)),
        ("peak_near_fifth_ct".to_string(), peak_near(&rows, cf, 702.0, 10.0)),
        ("peak_near_octave_ct".to_string(), peak_near(&rows, cf, 1200.0, 10.0)),
    ];
    let summary = json!({
        "condition": condition,
        "seed": seed,
        "metrics": metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    Ok(RunOutput {
        condition: condition.to_string(),
        seed,
        metrics,
        summary,
        files: vec![("scan.csv".into(), csv)],
    })
}
