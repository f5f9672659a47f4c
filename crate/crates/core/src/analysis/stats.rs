//! Seed-level statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
pub fn sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Pearson correlation. `None` when either side has zero variance or the
/// inputs are too short to define it.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean in Fisher z space, returned as `(mean_z, tanh(mean_z))`.
pub fn fisher_mean(rs: &[f64]) -> (f64, f64) {
    if rs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let lim = 1.0 - 1e-15;
    let z = rs.iter().map(|r| r.clamp(-lim, lim).atanh()).sum::<f64>() / rs.len() as f64;
    (z, z.tanh())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Welch {
    pub t: f64,
    pub dof: f64,
    pub p: f64,
}

/// Welch's unequal-variance t test, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> Option<Welch> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sd(a).powi(2) / na, sd(b).powi(2) / nb);
    let diff = mean(a) - mean(b);
    let se2 = va + vb;
    if se2 == 0.0 {
        let dof = na + nb - 2.0;
        return Some(if diff == 0.0 {
            Welch { t: 0.0, dof, p: 1.0 }
        } else {
            Welch { t: diff.signum() * f64::INFINITY, dof, p: 0.0 }
        });
    }
    let t = diff / se2.sqrt();
    let dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).ok()?;
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Some(Welch { t, dof, p })
}

/// Per-seed values of one metric with mean, sd and a t-based 95% interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub values: Vec<Option<f64>>,
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub ci95: Option<[f64; 2]>,
}

impl MetricSummary {
    pub fn new(values: Vec<Option<f64>>) -> Self {
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let n = present.len();
        if n == 0 {
            return Self { values, n, mean: None, sd: None, ci95: None };
        }
        let m = mean(&present);
        let s = sd(&present);
        let ci95 = if n >= 2 {
            let q = StudentsT::new(0.0, 1.0, (n - 1) as f64)
                .map(|d| d.inverse_cdf(0.975))
                .unwrap_or(f64::NAN);
            let h = q * s / (n as f64).sqrt();
            Some([m - h, m + h])
        } else {
            None
        };
        Self { values, n, mean: Some(m), sd: Some(s), ci95 }
    }

    pub fn from_values(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Some(v)).collect())
    }

    pub fn present(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson_r(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        assert!(pearson_r(&x, &[5.0; 4]).is_none());
    }

    #[test]
    fn fisher_cases() {
        assert_eq!(fisher_mean(&[0.0, 0.0, 0.0]), (0.0, 0.0));
        let (_, r) = fisher_mean(&[0.3]);
        assert!((r - 0.3).abs() < 1e-15);
        let (_, r2) = fisher_mean(&[r]);
        assert!((r2 - r).abs() < 1e-15);
    }

    #[test]
    fn welch_cases() {
        let a = [1.0, 2.0, 4.0, 7.0];
        let w = welch_t(&a, &a).unwrap();
        assert_eq!(w.t, 0.0);
        assert!((w.p - 1.0).abs() < 1e-12);
        // hand computation: means 2 and 5, variances 1 and 4, n = 3 each
        let w = welch_t(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((w.t + 3.0 / (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let dof = (5.0f64 / 3.0).powi(2) / ((1.0f64 / 3.0).powi(2) / 2.0 + (4.0f64 / 3.0).powi(2) / 2.0);
        assert!((w.dof - dof).abs() < 1e-12);
    }

    #[test]
    fn summary_interval() {
        let s = MetricSummary::from_values(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, Some(2.0));
        assert_eq!(s.sd, Some(1.0));
        let [lo, hi] = s.ci95.unwrap();
        // t(0.975, 2) = 4.302653
        assert!((hi - 2.0 - 4.302_653 / 3f64.sqrt()).abs() < 1e-5);
        assert!((lo + hi - 4.0).abs() < 1e-12);
    }
}
