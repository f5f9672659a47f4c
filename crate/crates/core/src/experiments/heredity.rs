//! Hereditary assay: 2x2 of respawn rule (lineage-biased or matched random)
//! and metabolic selection (energy deaths or a matched death schedule).

use rand::seq::index::sample;
use serde_json::json;

use super::config::ExperimentConfig;
use super::output::RunOutput;
use super::rng::{root_seed, stream, Stream};
use super::search::place_agents;
use super::world::{calibrated, CalibrationReport, World};
use crate::agents::loo_c;
use crate::analysis::{auc_c, interval_entropy, ji_score, pairwise_intervals, unique_pitch_bins, IntervalHistogram};
use crate::error::{Error, Result};
use crate::lifecycle::{is_dead, respawn_heredity, respawn_matched_random, respawn_random, settle_newborn};
use crate::output::sig6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RespawnArm {
    Heredity,
    MatchedRandom,
    /// Uniform over the band with no scene filter.
    HardRandom,
}

pub fn parse_condition(s: &str) -> Result<(RespawnArm, bool)> {
    Ok(match s {
        "heredity+selection" => (RespawnArm::Heredity, true),
        "random+selection" => (RespawnArm::MatchedRandom, true),
        "heredity-only" => (RespawnArm::Heredity, false),
        "random-only" => (RespawnArm::MatchedRandom, false),
        "hard-random+selection" => (RespawnArm::HardRandom, true),
        "hard-random-only" => (RespawnArm::HardRandom, false),
        _ => return Err(Error::Config(format!("unknown heredity condition '{s}'"))),
    })
}

pub struct HeredityTrace {
    pub trajectory: Vec<f64>,
    /// (tick, number of deaths) for every tick with at least one death.
    pub schedule: Vec<(u64, usize)>,
    pub deaths: usize,
    pub ji_samples: Vec<(u64, f64)>,
    pub final_bins: Vec<usize>,
    pub ticks: u64,
}

/// One arm. With `schedule` set, energy never kills; the listed numbers of
/// agents are removed at random at the listed ticks instead.
pub fn simulate(
    cfg: &ExperimentConfig,
    world: &World,
    arm: RespawnArm,
    schedule: Option<&[(u64, usize)]>,
    seed: u64,
) -> Result<(HeredityTrace, CalibrationReport)> {
    let hc = cfg.heredity;
    let mp = hc.metabolism;
    let sp = cfg.search;
    let root = root_seed(cfg.experiment, seed);
    let mut initial = place_agents(world, cfg.n_agents, &mut stream(root, Stream::Placement));
    for a in &mut initial {
        a.energy = mp.e0;
    }
    let bins: Vec<usize> = initial.iter().map(|a| a.pitch_bin).collect();
    let grid = *world.tables.grid();

    calibrated(world, &cfg.calibration, &bins, |cal| {
        let scene = world.scene(cal)?;
        let mut respawn_rng = stream(root, Stream::Respawn);
        let mut death_rng = stream(root, Stream::Deaths);
        let mut agents = initial.clone();
        let mut next_id = agents.len();
        let mut trajectory = Vec::with_capacity(hc.max_steps as usize);
        let mut own_schedule = Vec::new();
        let mut deaths = 0usize;
        let mut sched_pos = 0usize;
        let ji_now = |agents: &[crate::agents::Agent]| {
            let pc: Vec<f64> = agents.iter().map(|a| grid.cents(a.pitch_bin)).collect();
            ji_score(&pairwise_intervals(&pc))
        };
        let mut ji_samples = vec![(0u64, ji_now(&agents))];
        let mut tick = 0u64;
        while tick < hc.max_steps && deaths < hc.max_deaths {
            tick += 1;
            let c: Vec<f64> = (0..agents.len()).map(|i| loo_c(&scene, &agents, i, agents[i].pitch_bin)).collect();
            trajectory.push(c.iter().sum::<f64>() / c.len() as f64);
            let dead: Vec<usize> = match schedule {
                None => {
                    for (a, &ci) in agents.iter_mut().zip(&c) {
                        a.energy = mp.tick(a.energy, ci);
                    }
                    (0..agents.len()).filter(|&i| is_dead(agents[i].energy)).collect()
                }
                Some(s) => {
                    let mut d = Vec::new();
                    if sched_pos < s.len() && s[sched_pos].0 == tick {
                        let k = s[sched_pos].1.min(agents.len());
                        d = sample(&mut death_rng, agents.len(), k).into_vec();
                        d.sort_unstable();
                        sched_pos += 1;
                    }
                    d
                }
            };
            let mut n_dead = 0;
            for i in dead {
                if deaths >= hc.max_deaths {
                    break;
                }
                deaths += 1;
                n_dead += 1;
                let parent_bin = agents[i].pitch_bin;
                let parent_lineage = agents[i].lineage_id;
                let b = match arm {
                    RespawnArm::Heredity => {
                        respawn_heredity(parent_bin, &scene, &agents, i, &sp, hc.window_ct, &mut respawn_rng)
                    }
                    RespawnArm::MatchedRandom => {
                        respawn_matched_random(&scene, &agents, i, &sp, hc.matched_candidates, &mut respawn_rng)
                    }
                    RespawnArm::HardRandom => respawn_random(scene.band(), &mut respawn_rng),
                };
                let a = &mut agents[i];
                a.id = next_id;
                a.lineage_id = match arm {
                    RespawnArm::Heredity => parent_lineage,
                    RespawnArm::MatchedRandom | RespawnArm::HardRandom => next_id,
                };
                a.pitch_bin = b;
                a.energy = mp.e0;
                a.birth_tick = tick;
                next_id += 1;
                settle_newborn(&scene, &mut agents, i, &sp, hc.settle_ticks, &mut respawn_rng);
            }
            if n_dead > 0 {
                own_schedule.push((tick, n_dead));
            }
            if tick.is_multiple_of(hc.sample_every) {
                ji_samples.push((tick, ji_now(&agents)));
            }
        }
        let trace = HeredityTrace {
            trajectory,
            schedule: own_schedule,
            deaths,
            ji_samples,
            final_bins: agents.iter().map(|a| a.pitch_bin).collect(),
            ticks: tick,
        };
        Ok((trace, scene.clip_stats()))
    })
}

pub fn run_heredity(cfg: &ExperimentConfig, world: &World, condition: &str, seed: u64) -> Result<RunOutput> {
    let (arm, selection) = parse_condition(condition)?;
    let (trace, cal) = if selection {
        simulate(cfg, world, arm, None, seed)?
    } else {
        let (on, _) = simulate(cfg, world, arm, None, seed)?;
        simulate(cfg, world, arm, Some(&on.schedule), seed)?
    };
    let hc = cfg.heredity;
    let grid = world.tables.grid();
    let n = trace.trajectory.len();
    let tail = ((n as f64 * hc.final_fraction).ceil() as usize).clamp(1, n.max(1));
    let final_c = trace.trajectory[n - tail..].iter().sum::<f64>() / tail as f64;
    let pc: Vec<f64> = trace.final_bins.iter().map(|&b| grid.cents(b)).collect();
    let iv = pairwise_intervals(&pc);
    let crossing = trace.ji_samples.iter().find(|(_, j)| *j >= hc.ji_threshold).map(|(t, _)| *t);
    let metrics = vec![
        ("final_c_score".to_string(), Some(final_c)),
        ("auc_c".to_string(), auc_c(&trace.trajectory)),
        ("entropy".to_string(), Some(interval_entropy(&IntervalHistogram::from_intervals(&iv))?)),
        ("unique_bins".to_string(), Some(unique_pitch_bins(&trace.final_bins) as f64)),
        ("ji".to_string(), Some(ji_score(&iv))),
        ("ji_crossed".to_string(), Some(if crossing.is_some() { 1.0 } else { 0.0 })),
        ("deaths".to_string(), Some(trace.deaths as f64)),
        ("clip_fraction".to_string(), Some(cal.clip_fraction)),
    ];
    let mut csv = String::from("tick,c_score,ji\n");
    let mut js = trace.ji_samples.iter().peekable();
    for (k, c) in trace.trajectory.iter().enumerate() {
        let t = k as u64 + 1;
        if !t.is_multiple_of(hc.sample_every) {
            continue;
        }
        while js.peek().is_some_and(|(jt, _)| *jt < t) {
            js.next();
        }
        let ji = js.peek().filter(|(jt, _)| *jt == t).map(|(_, j)| sig6(*j)).unwrap_or_default();
        csv.push_str(&format!("{t},{},{ji}\n", sig6(*c)));
    }
    let summary = json!({
        "condition": condition,
        "seed": seed,
        "metrics": metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "ticks": trace.ticks,
        "ji_first_crossing_tick": crossing,
        "calibration": cal,
        "final_pitch_ct": pc,
    });
    Ok(RunOutput {
        condition: condition.to_string(),
        seed,
        metrics,
        summary,
        files: vec![("trajectory.csv".into(), csv.into_bytes())],
    })
}
