//! Product-limit survival curves for fully observed lifetimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    /// Distinct event times, ascending.
    pub times: Vec<f64>,
    /// Survival just after each event time.
    pub survival: Vec<f64>,
    pub n: usize,
    /// First time with `S(t) <= 0.5`.
    pub median: f64,
}

impl KmCurve {
    /// `S(t)`, a right-continuous step function.
    pub fn at(&self, t: f64) -> f64 {
        match self.times.iter().rposition(|&x| x <= t) {
            Some(k) => self.survival[k],
            None => 1.0,
        }
    }
}

pub fn kaplan_meier(lifetimes: &[f64]) -> Result<KmCurve> {
    if lifetimes.is_empty() {
        return Err(Error::Empty("survival group"));
    }
    let mut v = lifetimes.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mut times = Vec::new();
    let mut survival = Vec::new();
    let mut s = 1.0;
    let mut at_risk = n;
    let mut k = 0;
    while k < n {
        let t = v[k];
        let d = v[k..].iter().take_while(|&&x| x == t).count();
        s *= 1.0 - d as f64 / at_risk as f64;
        at_risk -= d;
        times.push(t);
        survival.push(s);
        k += d;
    }
    let median = times[survival.iter().position(|&x| x <= 0.5).expect("curve reaches zero")];
    Ok(KmCurve { times, survival, n, median })
}

/// Splits `lifetimes` by whether the paired predictor lies above the group
/// median. Returns `(high, low)`.
pub fn median_split(predictor: &[f64], lifetimes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = predictor.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return (vec![], vec![]);
    }
    let med = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (&c, &l) in predictor.iter().zip(lifetimes) {
        if c > med {
            high.push(l);
        } else {
            low.push(l);
        }
    }
    (high, low)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_product_limit() {
        let km = kaplan_meier(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(km.times, vec![1.0, 2.0, 3.0]);
        let want = [2.0 / 3.0, (2.0 / 3.0) * (1.0 / 2.0), 0.0];
        for (a, b) in km.survival.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(km.median, 2.0);
        assert_eq!(km.at(0.5), 1.0);
        assert_eq!(km.at(2.5), km.survival[1]);
    }

    #[test]
    fn equal_lifetimes() {
        let km = kaplan_meier(&[188.0; 10]).unwrap();
        assert_eq!(km.survival, vec![0.0]);
        assert_eq!(km.median, 188.0);
        assert!(kaplan_meier(&[]).is_err());
    }

    #[test]
    fn split() {
        let (h, l) = median_split(&[0.1, 0.9, 0.5, 0.7], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(h, vec![2.0, 4.0]);
        assert_eq!(l, vec![1.0, 3.0]);
    }
}
