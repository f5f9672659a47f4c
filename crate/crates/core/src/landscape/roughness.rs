//! Roughness: spectral energy integrated against the interference kernel on
//! the ERB-rate axis.

use super::kernels::{erb_rate_unchecked, PlKernel};
use super::spectrum::Spectrum;
use crate::grid::LogFreqGrid;

/// ERB-rate of every grid bin center.
pub fn erb_rates(grid: &LogFreqGrid) -> Vec<f64> {
    (0..grid.n_bins())
        .map(|b| erb_rate_unchecked(grid.freq(b)))
        .collect()
}

/// Raw roughness at a single probe bin.
pub fn roughness_at(s: &Spectrum, erb: &[f64], probe: usize) -> f64 {
    let kernel = PlKernel::new();
    let z = erb[probe];
    s.energy()
        .iter()
        .zip(erb)
        .filter(|(e, _)| **e != 0.0)
        .map(|(e, zj)| e * kernel.eval(z - zj))
        .sum()
}

/// Raw (uncalibrated) roughness field over the whole grid.
pub fn roughness(s: &Spectrum) -> Vec<f64> {
    let erb = erb_rates(s.grid());
    let kernel = PlKernel::new();
    let support: Vec<(f64, f64)> = s
        .energy()
        .iter()
        .zip(&erb)
        .filter(|(e, _)| **e != 0.0)
        .map(|(e, z)| (*e, *z))
        .collect();
    erb.iter()
        .map(|z| support.iter().map(|(e, zj)| e * kernel.eval(z - zj)).sum())
        .collect()
}
