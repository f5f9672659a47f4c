use std::fs;

use sonic_ecology::experiments::heredity::{simulate, RespawnArm};
use sonic_ecology::experiments::rng::{root_seed, stream, Stream};
use sonic_ecology::experiments::search::place_agents;
use sonic_ecology::experiments::{run_batch, run_one, write_batch, ExperimentConfig, ExperimentKind, World};

fn small(kind: ExperimentKind, seeds: &[u64]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default_for(kind);
    cfg.seeds = seeds.to_vec();
    cfg
}

#[test]
fn batches_do_not_depend_on_thread_count() {
    let mut cfg = small(ExperimentKind::Search, &[0, 1, 2]);
    cfg.search.n_sweeps = 5;
    let a = run_batch(&cfg, 1).unwrap();
    let b = run_batch(&cfg, 3).unwrap();
    let da = tempfile::tempdir().unwrap();
    let db = tempfile::tempdir().unwrap();
    let pa = write_batch(&cfg, &a, da.path(), &[]).unwrap();
    let pb = write_batch(&cfg, &b, db.path(), &[]).unwrap();
    for rel in ["summary.json", "manifest.json", "local-search/1/events.jsonl", "shuffled-landscape/2/sweeps.csv"] {
        assert_eq!(fs::read(pa.join(rel)).unwrap(), fs::read(pb.join(rel)).unwrap(), "{rel}");
    }
}

#[test]
fn output_layout() {
    let cfg = small(ExperimentKind::Entrain, &[4, 5]);
    let batch = run_batch(&cfg, 0).unwrap();
    let d = tempfile::tempdir().unwrap();
    let dir = write_batch(&cfg, &batch, d.path(), &["entrain.warmup_s=1".into()]).unwrap();
    assert_eq!(dir, d.path().join("entrain"));
    for c in ["shared", "scrambled", "off"] {
        for s in [4, 5] {
            let run = dir.join(c).join(s.to_string());
            assert!(run.join("summary.json").is_file());
            let csv = fs::read_to_string(run.join("onsets.csv")).unwrap();
            assert!(csv.starts_with("seed,condition,agent,onset_time_s\n"));
        }
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["overrides"][0], "entrain.warmup_s=1");
    assert_eq!(manifest["config"]["entrain"]["oscillator"]["k_base"], 3.0);
}

#[test]
fn conditions_share_placements() {
    let cfg = small(ExperimentKind::Search, &[7]);
    let world = World::build(&cfg).unwrap();
    let root = root_seed(cfg.experiment, 7);
    let a = place_agents(&world, 24, &mut stream(root, Stream::Placement));
    let b = place_agents(&world, 24, &mut stream(root, Stream::Placement));
    assert_eq!(a, b);
    let c = place_agents(&world, 24, &mut stream(root_seed(cfg.experiment, 8), Stream::Placement));
    assert_ne!(a, c);
}

#[test]
fn ablated_selection_lifetimes_are_constant() {
    let mut cfg = small(ExperimentKind::Selection, &[3]);
    cfg.selection.max_deaths = 80;
    let world = World::build(&cfg).unwrap();
    let run = run_one(&cfg, Some(&world), "recharge-off", 3).unwrap();
    let csv = String::from_utf8(run.files[0].1.clone()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "seed,agent,lineage,birth,death,lifetime_ticks,c_firstK,condition");
    let lifetimes: Vec<u64> = lines.map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(lifetimes.len(), 80);
    assert!(lifetimes.iter().all(|&l| l == 188));
    assert_eq!(run.metric("r"), Some(0.0));
    assert_eq!(run.summary["r_degenerate"], true);
}

#[test]
fn unselected_arm_replays_the_death_schedule() {
    let mut cfg = small(ExperimentKind::Heredity, &[2]);
    cfg.heredity.max_steps = 1500;
    let world = World::build(&cfg).unwrap();
    for arm in [RespawnArm::Heredity, RespawnArm::MatchedRandom] {
        let (on, _) = simulate(&cfg, &world, arm, None, 2).unwrap();
        let (off, _) = simulate(&cfg, &world, arm, Some(&on.schedule), 2).unwrap();
        assert!(on.deaths > 0);
        assert_eq!(on.deaths, off.deaths);
        assert_eq!(on.schedule, off.schedule);
    }
}

#[test]
fn unknown_condition_is_a_config_error() {
    let cfg = small(ExperimentKind::Entrain, &[0]);
    assert!(run_one(&cfg, None, "loud", 0).is_err());
    let mut bad = cfg.clone();
    bad.conditions = vec!["loud".into()];
    assert!(run_batch(&bad, 1).is_err());
}

#[test]
fn hard_random_restart_is_opt_in() {
    let cfg = small(ExperimentKind::Heredity, &[1]);
    assert!(!cfg.conditions.iter().any(|c| c.starts_with("hard-random")));
    let mut cfg = cfg.with_overrides(&["conditions=[\"hard-random+selection\"]".into()]).unwrap();
    cfg.heredity.max_steps = 600;
    let b = run_batch(&cfg, 1).unwrap();
    assert_eq!(b.runs.len(), 1);
    assert!(b.runs[0].metrics.iter().any(|(k, v)| k == "deaths" && v.is_some()));
}
