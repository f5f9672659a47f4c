//! Spectra on the log-frequency grid and harmonic voice deposits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::LogFreqGrid;

/// Nonnegative spectral energy per grid bin.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: LogFreqGrid,
    energy: Vec<f64>,
}

impl Spectrum {
    pub fn zeros(grid: LogFreqGrid) -> Self {
        Self {
            grid,
            energy: vec![0.0; grid.n_bins()],
        }
    }

    pub fn from_energy(grid: LogFreqGrid, energy: Vec<f64>) -> Result<Self> {
        if energy.len() != grid.n_bins() {
            return Err(Error::Domain(format!(
                "spectrum length {} does not match grid size {}",
                energy.len(),
                grid.n_bins()
            )));
        }
        if let Some(i) = energy.iter().position(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(Error::Domain(format!("negative or non-finite energy at bin {i}")));
        }
        Ok(Self { grid, energy })
    }

    pub fn grid(&self) -> &LogFreqGrid {
        &self.grid
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn total(&self) -> f64 {
        self.energy.iter().sum()
    }

    pub fn is_silent(&self) -> bool {
        self.energy.iter().all(|&e| e == 0.0)
    }

    /// Adds a single point partial of `amp` at `bin`.
    pub fn add_point(&mut self, bin: usize, amp: f64) {
        assert!(amp >= 0.0);
        self.energy[bin] += amp;
    }

    pub fn add(&mut self, other: &Spectrum) {
        assert_eq!(self.grid, other.grid, "spectra live on different grids");
        for (a, b) in self.energy.iter_mut().zip(&other.energy) {
            *a += b;
        }
    }

    /// Copy shifted by an integer number of bins; energy pushed off-grid is dropped.
    pub fn shifted(&self, bins: i64) -> Spectrum {
        let mut out = Spectrum::zeros(self.grid);
        let n = self.energy.len() as i64;
        for (i, &e) in self.energy.iter().enumerate() {
            let j = i as i64 + bins;
            if (0..n).contains(&j) {
                out.energy[j as usize] = e;
            }
        }
        out
    }
}

/// Harmonic timbre shared by agents and the drone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VoiceTimbre {
    pub n_partials: usize,
    /// Amplitude of partial k is `k^(-rolloff)`.
    pub rolloff: f64,
    /// Standard deviation of the Gaussian deposit, in cents.
    pub smear_ct: f64,
}

impl Default for VoiceTimbre {
    fn default() -> Self {
        Self {
            n_partials: 10,
            rolloff: 1.0,
            smear_ct: 5.0,
        }
    }
}

/// Gaussian deposits are cut at this many standard deviations.
const SMEAR_CUTOFF_SIGMAS: f64 = 4.0;

/// A timbre's deposit rendered as (bin offset from the fundamental, amplitude)
/// taps. Offsets are computed from the partial ratios alone, so deposits at
/// different pitches are exact integer translates of each other.
#[derive(Clone, Debug, PartialEq)]
pub struct VoicePattern {
    taps: Vec<(i64, f64)>,
}

impl VoicePattern {
    pub fn new(grid: &LogFreqGrid, timbre: &VoiceTimbre) -> Self {
        let sigma_bins = timbre.smear_ct / grid.bin_ct();
        let reach = if sigma_bins > 0.0 {
            (SMEAR_CUTOFF_SIGMAS * sigma_bins).ceil() as i64 + 1
        } else {
            0
        };
        let mut taps: Vec<(i64, f64)> = Vec::new();
        for k in 1..=timbre.n_partials {
            let amp = (k as f64).powf(-timbre.rolloff);
            let offset = grid.ratio_offset(k as f64);
            let base = offset.floor();
            let frac = offset - base;
            let base = base as i64;
            if sigma_bins == 0.0 {
                // No smear: split between the two neighbouring bins.
                push_tap(&mut taps, base, amp * (1.0 - frac));
                push_tap(&mut taps, base + 1, amp * frac);
                continue;
            }
            let mut weights = Vec::new();
            for m in -reach..=reach + 1 {
                let dist = m as f64 - frac;
                if dist.abs() <= SMEAR_CUTOFF_SIGMAS * sigma_bins {
                    weights.push((base + m, (-0.5 * (dist / sigma_bins).powi(2)).exp()));
                }
            }
            let total: f64 = weights.iter().map(|w| w.1).sum();
            for (off, w) in weights {
                push_tap(&mut taps, off, amp * w / total);
            }
        }
        taps.retain(|t| t.1 > 0.0);
        taps.sort_by_key(|t| t.0);
        Self { taps }
    }

    pub fn taps(&self) -> &[(i64, f64)] {
        &self.taps
    }

    /// Highest tap offset, i.e. the headroom a voice needs above its pitch.
    pub fn max_offset(&self) -> i64 {
        self.taps.last().map(|t| t.0).unwrap_or(0)
    }

    pub fn min_offset(&self) -> i64 {
        self.taps.first().map(|t| t.0).unwrap_or(0)
    }

    /// Adds `gain` times this pattern at `bin`; taps off the grid are dropped.
    pub fn deposit(&self, energy: &mut [f64], bin: usize, gain: f64) {
        let n = energy.len() as i64;
        for &(off, w) in &self.taps {
            let j = bin as i64 + off;
            if (0..n).contains(&j) {
                energy[j as usize] += gain * w;
            }
        }
    }
}

fn push_tap(taps: &mut Vec<(i64, f64)>, off: i64, w: f64) {
    if let Some(t) = taps.iter_mut().find(|t| t.0 == off) {
        t.1 += w;
    } else {
        taps.push((off, w));
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Voice {
    pub bin: usize,
    pub timbre: VoiceTimbre,
    pub gain: f64,
}

impl Voice {
    pub fn new(bin: usize) -> Self {
        Self {
            bin,
            timbre: VoiceTimbre::default(),
            gain: 1.0,
        }
    }
}

/// Linear superposition of harmonic voice deposits.
pub fn deposit_voices(grid: &LogFreqGrid, voices: &[Voice]) -> Result<Spectrum> {
    let mut spec = Spectrum::zeros(*grid);
    let mut cache: Vec<(VoiceTimbre, VoicePattern)> = Vec::new();
    for (i, v) in voices.iter().enumerate() {
        if v.bin >= grid.n_bins() {
            return Err(Error::VoiceOutOfGrid {
                voice: i,
                bin: v.bin as i64,
                lo: 0,
                hi: grid.n_bins() - 1,
            });
        }
        if !(v.gain >= 0.0) {
            return Err(Error::Domain(format!("voice {i} has negative gain {}", v.gain)));
        }
        let pattern = match cache.iter().find(|c| c.0 == v.timbre) {
            Some(c) => &c.1,
            None => {
                cache.push((v.timbre, VoicePattern::new(grid, &v.timbre)));
                &cache.last().unwrap().1
            }
        };
        pattern.deposit(&mut spec.energy, v.bin, v.gain);
    }
    Ok(spec)
}
