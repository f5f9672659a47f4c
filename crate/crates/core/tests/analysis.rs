use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use proptest::prelude::*;
use sonic_ecology::agents::Agent;
use sonic_ecology::analysis::{
    c_score_mean, fisher_mean, interval_entropy, ji_interval_score, ji_score, kaplan_meier, order_parameter,
    pairwise_intervals, plv, scene_consonance_g, vector_strength, welch_t, IntervalHistogram,
};
use sonic_ecology::landscape::{
    grid_for_band, single_anchor_scan, Calibration, HarmonicityParams, ResponseTables, VoiceTimbre,
};
use sonic_ecology::scene::Scene;

/// Brute force over every p, q <= 8 with the ratio folded into one octave.
fn ji_oracle(interval_ct: f64) -> f64 {
    let mut best: f64 = 0.0;
    for p in 1u32..=8 {
        for q in 1u32..=8 {
            let mut r = p as f64 / q as f64;
            while r >= 2.0 {
                r /= 2.0;
            }
            while r < 1.0 {
                r *= 2.0;
            }
            let c = 1200.0 * r.log2();
            let d = (interval_ct - c).abs().min(1200.0 - (interval_ct - c).abs());
            // weight uses the reduced, folded ratio
            let (mut a, mut b) = (p, q);
            let g = gcd(a, b);
            a /= g;
            b /= g;
            while a >= 2 * b {
                b *= 2;
            }
            while a < b {
                a *= 2;
            }
            let g = gcd(a, b);
            let w = (2.0 / ((a / g + b / g) as f64)).min(1.0);
            best = best.max(w * (-(d * d) / (2.0 * 15.0 * 15.0)).exp());
        }
    }
    best
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn ji_score_matches_brute_force() {
    for ct in [0.0, 100.0, 386.3, 498.0, 600.0, 702.0, 884.4, 1199.0] {
        assert!((ji_interval_score(ct) - ji_oracle(ct)).abs() < 1e-15, "{ct}");
    }
    let fifth = 1200.0 * 1.5f64.log2();
    assert!((ji_interval_score(702.0) - 0.4 * (-(702.0 - fifth).powi(2) / 450.0).exp()).abs() < 1e-15);
    assert_eq!(ji_interval_score(0.0), 1.0);
    assert!(ji_interval_score(600.0) < 0.1);
}

#[test]
fn uniform_entropy_is_ln_240() {
    let h = IntervalHistogram { counts: vec![3; 240] };
    assert!((interval_entropy(&h).unwrap() - 240f64.ln()).abs() <= 1e-12);
}

#[test]
fn km_hand_values() {
    let k = kaplan_meier(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(k.times, vec![1.0, 2.0, 3.0]);
    let want = [2.0 / 3.0, 1.0 / 3.0, 0.0];
    for (a, b) in k.survival.iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(k.median, 2.0);
    assert!(kaplan_meier(&[]).is_err());
}

#[test]
fn welch_of_identical_samples_is_zero() {
    let a = [0.3, 0.5, 0.9, 1.1];
    assert_eq!(welch_t(&a, &a).unwrap().t, 0.0);
}

fn scene() -> Scene {
    let t = VoiceTimbre::default();
    let hp = HarmonicityParams::default();
    let grid = grid_for_band(220.0, 2.0, &t, &hp).unwrap();
    let tables = ResponseTables::build(&grid, grid.band(2.0), &t, &hp).unwrap();
    let cal = Calibration::reference(&grid, &t, &hp).unwrap();
    Scene::new(Arc::new(tables), cal, vec![grid.anchor_bin()]).unwrap()
}

#[test]
fn consonance_summaries() {
    let s = scene();
    let grid = *s.grid();
    let a = grid.anchor_bin();
    let one = scene_consonance_g(&s, &[a + 50]).unwrap();
    assert!(one.h_soc.abs() < 1e-12 && one.r_soc.abs() < 1e-12 && one.g.abs() < 1e-12);
    assert!(scene_consonance_g(&s, &[]).is_err());
    let octave = scene_consonance_g(&s, &[a, a + 400]).unwrap().g;
    let tritone = scene_consonance_g(&s, &[a, a + 200]).unwrap().g;
    assert!(octave > tritone);

    let fifth = grid.bin_of_cents(702.0).unwrap();
    let scan = single_anchor_scan(220.0, 2.0, &VoiceTimbre::default(), &HarmonicityParams::default()).unwrap();
    let row = scan.iter().find(|r| (r.cents - 702.0).abs() < 1e-9).unwrap();
    let c = c_score_mean(&s, &[Agent::new(0, fifth)]).unwrap();
    assert!((c - row.c_field).abs() < 1e-12);

    let cluster: Vec<Agent> = (0..6).map(|k| Agent::new(k, a + 100 + k)).collect();
    let spread: Vec<Agent> = [0usize, 400, 234, 634, 800, 166].iter().enumerate().map(|(k, &d)| Agent::new(k, a + d)).collect();
    assert!(c_score_mean(&s, &cluster).unwrap() < c_score_mean(&s, &spread).unwrap());
}

proptest! {
    #[test]
    fn entropy_is_bounded(pitches in prop::collection::vec(-2400.0f64..2400.0, 2..40)) {
        let h = IntervalHistogram::from_pitches(&pitches);
        let n = pitches.len() as u64;
        prop_assert_eq!(h.total(), n * (n - 1) / 2);
        let e = interval_entropy(&h).unwrap();
        prop_assert!(e >= 0.0 && e <= 240f64.ln() + 1e-12);
        let ji = ji_score(&pairwise_intervals(&pitches));
        prop_assert!((0.0..=1.0).contains(&ji));
    }

    #[test]
    fn sync_measures_are_bounded_and_rotation_invariant(
        phases in prop::collection::vec(0.0f64..TAU, 1..50),
        rot in 0.0f64..TAU,
    ) {
        let r = order_parameter(&phases);
        let rotated: Vec<f64> = phases.iter().map(|p| p + rot).collect();
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!((order_parameter(&rotated) - r).abs() < 1e-9);

        let times: Vec<f64> = (0..phases.len()).map(|k| k as f64 * 0.01).collect();
        let a = plv(&phases, &times, 2.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((plv(&rotated, &times, 2.0).unwrap() - a).abs() < 1e-9);

        let onsets: Vec<f64> = phases.iter().map(|p| p / TAU * 0.5 + 3.0).collect();
        let vs = vector_strength(&onsets, 0.5).unwrap();
        prop_assert!((0.0..=1.0).contains(&vs));
        let shifted: Vec<f64> = onsets.iter().map(|t| t + rot / TAU * 0.5).collect();
        prop_assert!((vector_strength(&shifted, 0.5).unwrap() - vs).abs() < 1e-9);
    }

    #[test]
    fn fisher_mean_properties(rs in prop::collection::vec(-0.99f64..0.99, 1..20)) {
        let (_, m) = fisher_mean(&rs);
        let max = rs.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        prop_assert!(m.abs() <= max + 1e-12);
        let (_, once) = fisher_mean(&[rs[0]]);
        let (_, twice) = fisher_mean(&[once]);
        prop_assert!((once - rs[0]).abs() < 1e-12 && (twice - once).abs() < 1e-12);
    }

    #[test]
    fn km_is_the_empirical_survival(life in prop::collection::vec(1u32..50, 1..60)) {
        let v: Vec<f64> = life.iter().map(|&x| x as f64).collect();
        let k = kaplan_meier(&v).unwrap();
        for t in 0..=51 {
            let t = t as f64;
            let emp = v.iter().filter(|&&x| x > t).count() as f64 / v.len() as f64;
            prop_assert!((k.at(t) - emp).abs() < 1e-12);
        }
    }
}

#[test]
fn quarter_phases_cancel() {
    assert!(order_parameter(&[0.0, PI / 2.0, PI, 1.5 * PI]) < 1e-15);
}
