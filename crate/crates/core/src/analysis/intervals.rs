//! Pairwise interval structure of a population.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HIST_BINS: usize = 240;
pub const HIST_BIN_CT: f64 = 5.0;
pub const JI_SIGMA_CT: f64 = 15.0;
pub const JI_MAX_TERM: u32 = 8;

/// Interval between two pitches folded into `[0, 1200)`.
pub fn fold_interval(a_ct: f64, b_ct: f64) -> f64 {
    let d = (a_ct - b_ct).abs().rem_euclid(1200.0);
    if d >= 1200.0 {
        0.0
    } else {
        d
    }
}

/// Folded intervals of every unordered pair.
pub fn pairwise_intervals(pitches_ct: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pitches_ct.len() * pitches_ct.len().saturating_sub(1) / 2);
    for (i, &a) in pitches_ct.iter().enumerate() {
        for &b in &pitches_ct[i + 1..] {
            out.push(fold_interval(a, b));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalHistogram {
    pub counts: Vec<u64>,
}

impl IntervalHistogram {
    pub fn from_intervals(intervals_ct: &[f64]) -> Self {
        let mut counts = vec![0; HIST_BINS];
        for &c in intervals_ct {
            let k = ((c / HIST_BIN_CT).floor().max(0.0) as usize).min(HIST_BINS - 1);
            counts[k] += 1;
        }
        Self { counts }
    }

    pub fn from_pitches(pitches_ct: &[f64]) -> Self {
        Self::from_intervals(&pairwise_intervals(pitches_ct))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Shannon entropy in nats.
pub fn interval_entropy(h: &IntervalHistogram) -> Result<f64> {
    let n = h.total();
    if n == 0 {
        return Err(Error::Empty("interval histogram"));
    }
    let n = n as f64;
    Ok(h.counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum())
}

pub fn unique_pitch_bins(bins: &[usize]) -> usize {
    let mut v = bins.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Simple ratios `(p, q, cents)` folded into one octave and reduced, deduplicated.
pub fn ji_targets() -> Vec<(u32, u32, f64)> {
    let mut out: Vec<(u32, u32, f64)> = Vec::new();
    for p in 1..=JI_MAX_TERM {
        for q in 1..=JI_MAX_TERM {
            if gcd(p, q) != 1 {
                continue;
            }
            let (mut a, mut b) = (p, q);
            while a >= 2 * b {
                b *= 2;
            }
            while a < b {
                a *= 2;
            }
            let g = gcd(a, b);
            let (a, b) = (a / g, b / g);
            if !out.iter().any(|&(x, y, _)| x == a && y == b) {
                out.push((a, b, 1200.0 * (a as f64 / b as f64).log2()));
            }
        }
    }
    out.sort_by(|x, y| x.2.total_cmp(&y.2));
    out
}

/// Best weighted Gaussian proximity of one folded interval to a simple ratio.
pub fn ji_interval_score(interval_ct: f64) -> f64 {
    static TARGETS: OnceLock<Vec<(u32, u32, f64)>> = OnceLock::new();
    let two_s2 = 2.0 * JI_SIGMA_CT * JI_SIGMA_CT;
    TARGETS
        .get_or_init(ji_targets)
        .iter()
        .map(|&(p, q, c)| {
            let d = (interval_ct - c).rem_euclid(1200.0);
            let d = d.min(1200.0 - d);
            let w = (2.0 / (p + q) as f64).min(1.0);
            w * (-(d * d) / two_s2).exp()
        })
        .fold(0.0, f64::max)
}

/// Mean per-interval score; 0 for no intervals.
pub fn ji_score(intervals_ct: &[f64]) -> f64 {
    if intervals_ct.is_empty() {
        return 0.0;
    }
    intervals_ct.iter().map(|&c| ji_interval_score(c)).sum::<f64>() / intervals_ct.len() as f64
}

/// Mean distance in cents from each pitch to its nearest neighbour.
pub fn nearest_neighbour_ct(pitches_ct: &[f64]) -> Option<f64> {
    if pitches_ct.len() < 2 {
        return None;
    }
    let mut v = pitches_ct.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let total: f64 = (0..n)
        .map(|i| {
            let left = if i > 0 { v[i] - v[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < n { v[i + 1] - v[i] } else { f64::INFINITY };
            left.min(right)
        })
        .sum();
    Some(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_units() {
        let mut h = IntervalHistogram { counts: vec![0; 240] };
        h.counts[3] = 7;
        assert_eq!(interval_entropy(&h).unwrap(), 0.0);
        h.counts[9] = 7;
        assert!((interval_entropy(&h).unwrap() - 2f64.ln()).abs() < 1e-15);
        let u = IntervalHistogram { counts: vec![2; 240] };
        assert!((interval_entropy(&u).unwrap() - 240f64.ln()).abs() < 1e-12);
        assert!(interval_entropy(&IntervalHistogram { counts: vec![0; 240] }).is_err());
    }

    #[test]
    fn histogram_counts_pairs() {
        let p = [0.0, 100.0, 1300.0, 2400.0, 703.0];
        let h = IntervalHistogram::from_pitches(&p);
        assert_eq!(h.total(), 10);
        // 0 vs 2400 and 100 vs 1300 fold to unison
        assert_eq!(h.counts[0], 2);
    }

    #[test]
    fn unique_bins() {
        assert_eq!(unique_pitch_bins(&[5; 24]), 1);
        assert_eq!(unique_pitch_bins(&(0..24).collect::<Vec<_>>()), 24);
        assert_eq!(unique_pitch_bins(&[0, 0, 1]), 2);
    }

    #[test]
    fn targets_are_reduced() {
        let t = ji_targets();
        assert_eq!(t[0], (1, 1, 0.0));
        assert!(t.iter().any(|&(p, q, _)| p == 3 && q == 2));
        assert!(t.iter().all(|&(p, q, c)| gcd(p, q) == 1 && (0.0..1200.0).contains(&c)));
    }

    #[test]
    fn nn_spacing() {
        assert_eq!(nearest_neighbour_ct(&[0.0, 10.0, 40.0]), Some((10.0 + 10.0 + 30.0) / 3.0));
        assert_eq!(nearest_neighbour_ct(&[1.0]), None);
    }
}
