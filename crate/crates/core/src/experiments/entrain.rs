//! Entrainment assay: oscillators pulled toward a shared, scrambled or absent
//! 2 Hz drive, scored against a fixed 2 Hz reference beat.

use serde_json::json;

use super::config::ExperimentConfig;
use super::output::RunOutput;
use super::rng::{root_seed, stream, Stream};
use crate::analysis::{order_parameter, plv, vector_strength};
use crate::entrainment::{extract_onsets, phase_step, Drive, DriveCondition};
use crate::error::{Error, Result};
use crate::output::sig6;
use rand::Rng;

pub fn parse_condition(s: &str) -> Result<DriveCondition> {
    Ok(match s {
        "shared" => DriveCondition::Shared,
        "scrambled" => DriveCondition::Scrambled,
        "off" => DriveCondition::Off,
        _ => return Err(Error::Config(format!("unknown entrain condition '{s}'"))),
    })
}

pub struct EntrainTrace {
    /// `phases[agent][tick]`, tick 0 being the initial state.
    pub phases: Vec<Vec<f64>>,
    pub onsets: Vec<Vec<f64>>,
    pub dt: f64,
}

pub fn simulate(cfg: &ExperimentConfig, condition: DriveCondition, seed: u64) -> EntrainTrace {
    let op = cfg.entrain.oscillator;
    let root = root_seed(cfg.experiment, seed);
    let mut init = stream(root, Stream::PhaseInit);
    let n = cfg.n_agents;
    let omega: Vec<f64> = (0..n).map(|_| op.draw_omega(&mut init)).collect();
    let mut phi: Vec<f64> = (0..n).map(|_| init.random_range(0.0..std::f64::consts::TAU)).collect();
    let mut scramble = stream(root, Stream::Scramble);
    let mut drive = Drive::new(condition, op.drive_hz);
    let ticks = op.n_ticks();
    let mut phases: Vec<Vec<f64>> = phi.iter().map(|&p| {
        let mut v = Vec::with_capacity(ticks + 1);
        v.push(p);
        v
    }).collect();
    for k in 0..ticks {
        let theta = drive.phase(k as f64 * op.dt, &mut scramble);
        for (i, p) in phi.iter_mut().enumerate() {
            *p = phase_step(*p, omega[i], theta, op.k_base, op.dt);
            phases[i].push(*p);
        }
    }
    let onsets = phases.iter().map(|tr| extract_onsets(tr, 0.0, op.dt)).collect();
    EntrainTrace { phases, onsets, dt: op.dt }
}

pub fn run_entrain(cfg: &ExperimentConfig, condition: &str, seed: u64) -> Result<RunOutput> {
    let cond = parse_condition(condition)?;
    let ec = cfg.entrain;
    let op = ec.oscillator;
    let trace = simulate(cfg, cond, seed);
    let period = 1.0 / op.drive_hz;

    let scored: Vec<f64> = trace.onsets.iter().flatten().copied().filter(|&t| t >= ec.warmup_s).collect();
    let vs = vector_strength(&scored, period);

    // PLV per window, averaged over agents; R(t) at each window end.
    let ticks = trace.phases[0].len();
    let per_window = ((ec.plv_window_s / trace.dt).round() as usize).max(1);
    let mut plv_course = Vec::new();
    let mut r_course = Vec::new();
    let mut start = 0;
    while start + per_window <= ticks {
        let times: Vec<f64> = (start..start + per_window).map(|k| k as f64 * trace.dt).collect();
        let vals: Vec<f64> = trace
            .phases
            .iter()
            .filter_map(|tr| plv(&tr[start..start + per_window], &times, op.drive_hz))
            .collect();
        plv_course.push(vals.iter().sum::<f64>() / vals.len().max(1) as f64);
        let last = start + per_window - 1;
        let snapshot: Vec<f64> = trace.phases.iter().map(|tr| tr[last]).collect();
        r_course.push(order_parameter(&snapshot));
        start += per_window;
    }
    let tail = |v: &[f64]| {
        let k = (v.len() / 4).max(1).min(v.len());
        (k > 0).then(|| v[v.len() - k..].iter().sum::<f64>() / k as f64)
    };
    let n_onsets = trace.onsets.iter().map(Vec::len).sum::<usize>();
    let metrics = vec![
        ("vector_strength".to_string(), vs),
        ("plv_final".to_string(), tail(&plv_course)),
        ("order_final".to_string(), tail(&r_course)),
        ("onsets_per_agent".to_string(), Some(n_onsets as f64 / trace.onsets.len().max(1) as f64)),
    ];

    let mut csv = String::from("seed,condition,agent,onset_time_s\n");
    for (i, on) in trace.onsets.iter().enumerate() {
        for t in on {
            csv.push_str(&format!("{seed},{condition},{i},{}\n", sig6(*t)));
        }
    }
    let mut course = String::from("window_end_s,plv,order_parameter\n");
    for (w, (p, r)) in plv_course.iter().zip(&r_course).enumerate() {
        course.push_str(&format!("{},{},{}\n", sig6((w + 1) as f64 * ec.plv_window_s), sig6(*p), sig6(*r)));
    }
    let mut files = vec![
        ("onsets.csv".to_string(), csv.into_bytes()),
        ("plv.csv".to_string(), course.into_bytes()),
    ];
    if ec.dump_phases {
        let mut bin = Vec::with_capacity(trace.phases.len() * ticks * 4);
        for tr in &trace.phases {
            for &p in tr {
                bin.extend_from_slice(&(p as f32).to_le_bytes());
            }
        }
        files.push(("phases.f32".to_string(), bin));
    }
    let summary = json!({
        "condition": condition,
        "seed": seed,
        "metrics": metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "plv_course": plv_course,
        "order_course": r_course,
    });
    Ok(RunOutput { condition: condition.to_string(), seed, metrics, summary, files })
}
