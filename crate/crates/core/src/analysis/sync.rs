//! Synchrony measures and trajectory summaries.

use std::f64::consts::TAU;

fn resultant<I: IntoIterator<Item = f64>>(angles: I) -> Option<f64> {
    let (mut c, mut s, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        c += a.cos();
        s += a.sin();
        n += 1;
    }
    if n == 0 {
        return None;
    }
    Some(((c * c + s * s).sqrt() / n as f64).min(1.0))
}

/// Kuramoto order parameter `|mean exp(i phi)|`; 0 for an empty population.
pub fn order_parameter(phases: &[f64]) -> f64 {
    resultant(phases.iter().copied()).unwrap_or(0.0)
}

/// Phase locking of one phase trace to a beat at `beat_hz`, sampled at `times`.
pub fn plv(phases: &[f64], times: &[f64], beat_hz: f64) -> Option<f64> {
    resultant(phases.iter().zip(times).map(|(&p, &t)| p - TAU * beat_hz * t))
}

/// Vector strength of onset times against a beat period; `None` without onsets.
pub fn vector_strength(onsets: &[f64], period: f64) -> Option<f64> {
    resultant(onsets.iter().map(|&t| TAU * t / period))
}

/// Time average of a uniformly sampled trajectory (trapezoid rule).
pub fn auc_c(trajectory: &[f64]) -> Option<f64> {
    match trajectory.len() {
        0 => None,
        1 => Some(trajectory[0]),
        n => {
            let area: f64 = trajectory.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum();
            Some(area / (n - 1) as f64)
        }
    }
}
