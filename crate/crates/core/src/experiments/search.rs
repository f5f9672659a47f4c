//! Consonance search: 24 agents and a drone adapting pitch over 8 sweeps.

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::config::ExperimentConfig;
use super::output::RunOutput;
use super::rng::{root_seed, stream, Stream};
use super::world::{calibrated, CalibrationReport, World};
use crate::agents::{run_sweep, Agent, SweepEvent, SweepMode};
use crate::analysis::{
    interval_entropy, ji_score, nearest_neighbour_ct, pairwise_intervals, scene_consonance_g,
    unique_pitch_bins, IntervalHistogram,
};
use crate::error::{Error, Result};
use crate::landscape::BinPermutation;
use crate::output::sig6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchCondition {
    LocalSearch,
    RandomWalk,
    ShuffledLandscape,
    ConsonanceOnly,
}

impl SearchCondition {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "local-search" => Self::LocalSearch,
            "random-walk" => Self::RandomWalk,
            "shuffled-landscape" => Self::ShuffledLandscape,
            "consonance-only" => Self::ConsonanceOnly,
            _ => return Err(Error::Config(format!("unknown search condition '{s}'"))),
        })
    }

    fn mode(&self) -> SweepMode {
        match self {
            Self::RandomWalk => SweepMode::RandomWalk,
            _ => SweepMode::LocalSearch,
        }
    }

    fn uses_curriculum(&self) -> bool {
        !matches!(self, Self::ConsonanceOnly)
    }
}

/// Population state after each sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepStats {
    pub sweep: usize,
    pub sign: f64,
    pub temperature: f64,
    pub c_score: f64,
    pub g: f64,
    pub h_soc: f64,
    pub r_soc: f64,
    pub entropy: f64,
    pub unique_bins: usize,
    pub ji: f64,
    pub accepted: usize,
}

pub struct SearchTrace {
    pub agents: Vec<Agent>,
    pub events: Vec<SweepEvent>,
    pub sweeps: Vec<SweepStats>,
    pub initial_g: f64,
}

pub fn place_agents<R: Rng + ?Sized>(world: &World, n: usize, rng: &mut R) -> Vec<Agent> {
    let band = world.tables.band();
    (0..n).map(|i| Agent::new(i, rng.random_range(band.lo..=band.hi))).collect()
}

fn pitches(world: &World, agents: &[Agent]) -> Vec<f64> {
    let g = world.tables.grid();
    agents.iter().filter(|a| a.alive).map(|a| g.cents(a.pitch_bin)).collect()
}

pub fn run_search(cfg: &ExperimentConfig, world: &World, condition: &str, seed: u64) -> Result<RunOutput> {
    let cond = SearchCondition::parse(condition)?;
    let root = root_seed(cfg.experiment, seed);
    let initial = place_agents(world, cfg.n_agents, &mut stream(root, Stream::Placement));
    let bins: Vec<usize> = initial.iter().map(|a| a.pitch_bin).collect();
    let p = cfg.search;

    let (trace, cal) = calibrated(world, &cfg.calibration, &bins, |cal| {
        let mut scene = world.scene(cal)?;
        if cond == SearchCondition::ShuffledLandscape {
            let perm = BinPermutation::from_rng(world.tables.band().len(), &mut stream(root, Stream::Shuffle));
            scene = scene.with_permutation(perm)?;
        }
        let mut rng = stream(root, Stream::Proposals);
        let mut agents = initial.clone();
        let mut events = Vec::new();
        let mut sweeps = Vec::new();
        let initial_g = scene_consonance_g(&scene, &bins)?.g;
        for s in 0..p.n_sweeps {
            let sign = if cond.uses_curriculum() && s < p.switch_sweep { -1.0 } else { 1.0 };
            let ev = run_sweep(&scene, &mut agents, s, sign, &p, cond.mode(), &mut rng);
            let now: Vec<usize> = agents.iter().map(|a| a.pitch_bin).collect();
            let soc = scene_consonance_g(&scene, &now)?;
            let pc = pitches(world, &agents);
            let iv = pairwise_intervals(&pc);
            sweeps.push(SweepStats {
                sweep: s,
                sign,
                temperature: crate::agents::anneal_temperature(s, &p),
                c_score: ev.iter().map(|e| e.loo_c).sum::<f64>() / ev.len() as f64,
                g: soc.g,
                h_soc: soc.h_soc,
                r_soc: soc.r_soc,
                entropy: interval_entropy(&IntervalHistogram::from_intervals(&iv))?,
                unique_bins: unique_pitch_bins(&now),
                ji: ji_score(&iv),
                accepted: ev.iter().filter(|e| e.accepted).count(),
            });
            events.extend(ev);
        }
        let clip = scene.clip_stats();
        Ok((SearchTrace { agents, events, sweeps, initial_g }, clip))
    })?;
    package(cfg, world, condition, seed, trace, cal)
}

fn package(
    cfg: &ExperimentConfig,
    world: &World,
    condition: &str,
    seed: u64,
    trace: SearchTrace,
    cal: CalibrationReport,
) -> Result<RunOutput> {
    let p = &cfg.search;
    let last = trace.sweeps.last().ok_or(Error::Empty("sweeps"))?;
    let pre_switch_g = if p.switch_sweep == 0 {
        trace.initial_g
    } else {
        trace.sweeps[p.switch_sweep - 1].g
    };
    let post: Vec<&SweepStats> = trace.sweeps.iter().filter(|s| s.sweep >= p.burn_in_sweeps).collect();
    let c_post = post.iter().map(|s| s.c_score).sum::<f64>() / post.len() as f64;
    let pc = pitches(world, &trace.agents);
    let metrics = vec![
        ("entropy".to_string(), Some(last.entropy)),
        ("unique_bins".to_string(), Some(last.unique_bins as f64)),
        ("ji".to_string(), Some(last.ji)),
        ("c_score".to_string(), Some(last.c_score)),
        ("c_score_post_burn_in".to_string(), Some(c_post)),
        ("g_final".to_string(), Some(last.g)),
        ("g_gain".to_string(), Some(last.g - pre_switch_g)),
        ("nn_spacing_ct".to_string(), nearest_neighbour_ct(&pc)),
        ("clip_fraction".to_string(), Some(cal.clip_fraction)),
    ];

    let mut events = Vec::new();
    for e in &trace.events {
        serde_json::to_writer(&mut events, e)?;
        events.push(b'\n');
    }
    let mut csv = String::from("sweep,sign,temperature,c_score,g,h_soc,r_soc,entropy,unique_bins,ji,accepted\n");
    for s in &trace.sweeps {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            s.sweep,
            s.sign,
            sig6(s.temperature),
            sig6(s.c_score),
            sig6(s.g),
            sig6(s.h_soc),
            sig6(s.r_soc),
            sig6(s.entropy),
            s.unique_bins,
            sig6(s.ji),
            s.accepted
        ));
    }
    let final_pitches: Vec<f64> = pc.clone();
    let summary = json!({
        "condition": condition,
        "seed": seed,
        "metrics": metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "calibration": cal,
        "initial_g": trace.initial_g,
        "sweeps": trace.sweeps,
        "final_pitch_ct": final_pitches,
    });
    Ok(RunOutput {
        condition: condition.to_string(),
        seed,
        metrics,
        summary,
        files: vec![
            ("events.jsonl".into(), events),
            ("sweeps.csv".into(), csv.into_bytes()),
        ],
    })
}
