//! Metabolic selection: fixed-pitch agents recharge from consonance and are
//! replaced at random when they starve.

use serde_json::json;

use super::config::ExperimentConfig;
use super::output::RunOutput;
use super::rng::{root_seed, stream, Stream};
use super::search::place_agents;
use super::world::{calibrated, World};
use crate::agents::loo_c;
use crate::analysis::{kaplan_meier, median_split, pearson_r};
use crate::error::{Error, Result};
use crate::landscape::c_level01;
use crate::lifecycle::{is_dead, respawn_random, EarlyWindow, LifetimeRecord, MetabolicParams};
use crate::output::sig6;

pub fn recharge_params(condition: &str, base: &MetabolicParams) -> Result<MetabolicParams> {
    match condition {
        "recharge-on" => Ok(*base),
        "recharge-off" => Ok(MetabolicParams { r_e: 0.0, ..*base }),
        _ => Err(Error::Config(format!("unknown selection condition '{condition}'"))),
    }
}

pub struct SelectionTrace {
    pub records: Vec<LifetimeRecord>,
    pub ticks: u64,
}

pub fn run_selection(cfg: &ExperimentConfig, world: &World, condition: &str, seed: u64) -> Result<RunOutput> {
    let mp = recharge_params(condition, &cfg.selection.metabolism)?;
    let sc = cfg.selection;
    let root = root_seed(cfg.experiment, seed);
    let mut initial = place_agents(world, cfg.n_agents, &mut stream(root, Stream::Placement));
    for a in &mut initial {
        a.energy = mp.e0;
    }
    let bins: Vec<usize> = initial.iter().map(|a| a.pitch_bin).collect();
    let band = world.tables.band();

    let (trace, cal) = calibrated(world, &cfg.calibration, &bins, |cal| {
        let scene = world.scene(cal)?;
        let mut rng = stream(root, Stream::Respawn);
        let mut agents = initial.clone();
        let mut windows = vec![EarlyWindow::default(); agents.len()];
        let mut next_id = agents.len();
        let mut records = Vec::new();
        let mut tick = 0u64;
        'run: while records.len() < sc.max_deaths && tick < sc.max_ticks {
            tick += 1;
            let c: Vec<f64> = (0..agents.len()).map(|i| loo_c(&scene, &agents, i, agents[i].pitch_bin)).collect();
            for i in 0..agents.len() {
                windows[i].push(c_level01(c[i], cfg.level.beta, cfg.level.theta), sc.k_first);
                agents[i].energy = mp.tick(agents[i].energy, c[i]);
            }
            for i in 0..agents.len() {
                if !is_dead(agents[i].energy) {
                    continue;
                }
                let a = &agents[i];
                records.push(LifetimeRecord {
                    agent: a.id,
                    lineage: a.lineage_id,
                    birth_tick: a.birth_tick,
                    death_tick: tick,
                    lifetime_ticks: tick - a.birth_tick,
                    c_first_k: windows[i].mean(),
                    final_bin: a.pitch_bin,
                });
                if records.len() >= sc.max_deaths {
                    break 'run;
                }
                let b = respawn_random(band, &mut rng);
                let a = &mut agents[i];
                a.id = next_id;
                a.lineage_id = next_id;
                a.pitch_bin = b;
                a.energy = mp.e0;
                a.birth_tick = tick;
                windows[i] = EarlyWindow::default();
                next_id += 1;
            }
        }
        Ok((SelectionTrace { records, ticks: tick }, scene.clip_stats()))
    })?;

    let x: Vec<f64> = trace.records.iter().map(|r| r.c_first_k).collect();
    let y: Vec<f64> = trace.records.iter().map(|r| r.lifetime_ticks as f64).collect();
    let r = pearson_r(&x, &y);
    let degenerate = r.is_none();
    let (high, low) = median_split(&x, &y);
    let med = |v: &[f64]| kaplan_meier(v).ok().map(|k| k.median);
    let metrics = vec![
        ("r".to_string(), Some(r.unwrap_or(0.0))),
        ("mean_lifetime".to_string(), Some(y.iter().sum::<f64>() / y.len().max(1) as f64)),
        ("median_high".to_string(), med(&high)),
        ("median_low".to_string(), med(&low)),
        ("deaths".to_string(), Some(trace.records.len() as f64)),
        ("clip_fraction".to_string(), Some(cal.clip_fraction)),
    ];
    let mut csv = String::from("seed,agent,lineage,birth,death,lifetime_ticks,c_firstK,condition\n");
    for rec in &trace.records {
        csv.push_str(&format!(
            "{seed},{},{},{},{},{},{},{condition}\n",
            rec.agent,
            rec.lineage,
            rec.birth_tick,
            rec.death_tick,
            rec.lifetime_ticks,
            sig6(rec.c_first_k)
        ));
    }
    let summary = json!({
        "condition": condition,
        "seed": seed,
        "metrics": metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "r_degenerate": degenerate,
        "ticks": trace.ticks,
        "calibration": cal,
        "high_split_lifetimes": high,
        "low_split_lifetimes": low,
    });
    Ok(RunOutput {
        condition: condition.to_string(),
        seed,
        metrics,
        summary,
        files: vec![("lifetimes.csv".into(), csv.into_bytes())],
    })
}
