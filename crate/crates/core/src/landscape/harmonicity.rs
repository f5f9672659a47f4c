//! Harmonicity by two-pass sibling projection.
//!
//! The downward pass gathers evidence for virtual roots,
//! `Roots(x) = Σ_k S(x + log2 k)·k^(−ρ)`, and the upward pass spreads it back
//! onto the harmonics, `H(x) = Σ_m Roots(x − log2 m)·m^(−ρ)`. The undertone
//! projection runs the same two passes in the opposite order and the two are
//! averaged.

use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};
use crate::grid::LogFreqGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicityParams {
    /// Template order N.
    pub order: usize,
    /// Power-law exponent of the template weights `k^(−ρ)`.
    pub rho: f64,
}

impl Default for HarmonicityParams {
    fn default() -> Self {
        Self { order: 16, rho: 0.4 }
    }
}

impl HarmonicityParams {
    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::Domain("harmonicity order must be >= 1".into()));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Domain(format!("harmonicity rho must be > 0, got {}", self.rho)));
        }
        Ok(())
    }
}

/// One fractional shift of a projection pass, pre-split for linear interpolation.
#[derive(Clone, Copy, Debug)]
struct Shift {
    base: i64,
    frac: f64,
    weight: f64,
}

fn shifts(grid: &LogFreqGrid, params: &HarmonicityParams, sign: f64) -> Vec<Shift> {
    (1..=params.order)
        .map(|k| {
            let off = sign * grid.ratio_offset(k as f64);
            let base = off.floor();
            Shift {
                base: base as i64,
                frac: off - base,
                weight: (k as f64).powf(-params.rho),
            }
        })
        .collect()
}

/// `out[x] = Σ w·src(x + offset)` with linear interpolation; off-grid reads are zero.
fn project(src: &[f64], shifts: &[Shift]) -> Vec<f64> {
    let n = src.len() as i64;
    let at = |j: i64| if (0..n).contains(&j) { src[j as usize] } else { 0.0 };
    let mut out = vec![0.0; src.len()];
    for (x, o) in out.iter_mut().enumerate() {
        let x = x as i64;
        let mut acc = 0.0;
        for s in shifts {
            let j = x + s.base;
            acc += s.weight * ((1.0 - s.frac) * at(j) + s.frac * at(j + 1));
        }
        *o = acc;
    }
    out
}

/// Overtone projection only: roots first, then harmonics.
pub fn overtone_projection(s: &Spectrum, params: &HarmonicityParams) -> Vec<f64> {
    let up = shifts(s.grid(), params, 1.0);
    let down = shifts(s.grid(), params, -1.0);
    let roots = project(s.energy(), &up);
    project(&roots, &down)
}

/// Undertone projection: the two passes in swapped order.
pub fn undertone_projection(s: &Spectrum, params: &HarmonicityParams) -> Vec<f64> {
    let up = shifts(s.grid(), params, 1.0);
    let down = shifts(s.grid(), params, -1.0);
    let subs = project(s.energy(), &down);
    project(&subs, &up)
}

/// Raw (uncalibrated) harmonicity over the grid; equal blend of both projections.
pub fn harmonicity(s: &Spectrum, params: &HarmonicityParams) -> Result<Vec<f64>> {
    params.validate()?;
    if s.is_silent() {
        return Ok(vec![0.0; s.energy().len()]);
    }
    let over = overtone_projection(s, params);
    let under = undertone_projection(s, params);
    Ok(over.iter().zip(&under).map(|(a, b)| 0.5 * (a + b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::spectrum::{deposit_voices, Voice};

    /// Straight evaluation of the double sum at one bin, no pass structure.
    fn brute_force_at(s: &Spectrum, params: &HarmonicityParams, x: usize) -> f64 {
        let grid = s.grid();
        let e = s.energy();
        let get = |i: i64| if i >= 0 && (i as usize) < e.len() { e[i as usize] } else { 0.0 };
        let mut h = 0.0;
        for m in 1..=params.order {
            for k in 1..=params.order {
                let w = ((k * m) as f64).powf(-params.rho);
                let pos = x as f64 + grid.ratio_offset(k as f64) - grid.ratio_offset(m as f64);
                let j = pos.floor();
                let f = pos - j;
                h += w * ((1.0 - f) * get(j as i64) + f * get(j as i64 + 1));
            }
        }
        h
    }

    #[test]
    fn brute_force_argmax_is_the_voice_pitch() {
        let grid = LogFreqGrid::with_span(1.0);
        let params = HarmonicityParams::default();
        let s = deposit_voices(&grid, &[Voice::new(grid.anchor_bin())]).unwrap();
        let bf: Vec<f64> = (0..grid.n_bins()).map(|x| brute_force_at(&s, &params, x)).collect();
        let argmax = (0..bf.len()).max_by(|&a, &b| bf[a].total_cmp(&bf[b])).unwrap();
        assert_eq!(argmax, grid.anchor_bin());
        let h = harmonicity(&s, &params).unwrap();
        let argmax = (0..h.len()).max_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap();
        assert_eq!(argmax, grid.anchor_bin());
    }

    #[test]
    fn single_voice_peaks_at_its_pitch() {
        let grid = LogFreqGrid::with_span(1.0);
        let params = HarmonicityParams { order: 4, rho: 0.4 };
        let s = deposit_voices(&grid, &[Voice::new(grid.anchor_bin())]).unwrap();
        let h = harmonicity(&s, &params).unwrap();
        let argmax = (0..h.len()).max_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap();
        assert_eq!(argmax, grid.anchor_bin());
    }

    #[test]
    fn passes_agree_with_double_sum_away_from_edges() {
        let grid = LogFreqGrid::with_span(4.0);
        let params = HarmonicityParams { order: 3, rho: 0.4 };
        let s = deposit_voices(&grid, &[Voice::new(grid.anchor_bin() - 50)]).unwrap();
        let over = overtone_projection(&s, &params);
        for x in [1300, 1350, 1400, 1420, 1500, 1800] {
            let bf = brute_force_at(&s, &params, x);
            // the pass form interpolates twice, the double sum once
            assert!((over[x] - bf).abs() < 0.05 * bf.max(1e-3), "x={x} {} vs {bf}", over[x]);
        }
    }

    #[test]
    fn overtone_and_undertone_coincide_in_interior() {
        let params = HarmonicityParams::default();
        let timbre = crate::landscape::VoiceTimbre::default();
        let grid = crate::landscape::grid_for_band(220.0, 2.0, &timbre, &params).unwrap();
        let a = grid.anchor_bin();
        let s = deposit_voices(&grid, &[Voice::new(a), Voice::new(a + 234)]).unwrap();
        let over = overtone_projection(&s, &params);
        let under = undertone_projection(&s, &params);
        for x in grid.band(2.0).iter() {
            assert!((over[x] - under[x]).abs() < 1e-9 * over[x].max(1.0));
        }
    }

    #[test]
    fn silent_spectrum_gives_zero_field() {
        let grid = LogFreqGrid::with_span(1.0);
        let h = harmonicity(&Spectrum::zeros(grid), &HarmonicityParams::default()).unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_params() {
        let grid = LogFreqGrid::with_span(1.0);
        let s = Spectrum::zeros(grid);
        assert!(harmonicity(&s, &HarmonicityParams { order: 0, rho: 0.4 }).is_err());
        assert!(harmonicity(&s, &HarmonicityParams { order: 4, rho: 0.0 }).is_err());
    }
}
