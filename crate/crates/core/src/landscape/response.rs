//! Per-voice response tables.
//!
//! Harmonicity and roughness are linear in the spectrum, so the raw field of a
//! scene at a probe bin is the sum of each voice's own raw field there. These
//! tables store, for every voice position `v` and probe `x` inside a band, the
//! raw H and R a single voice at `v` produces at `x`. Scene evaluation then
//! costs one lookup per voice instead of a full field rebuild.

use super::harmonicity::{harmonicity, HarmonicityParams};
use super::roughness::erb_rates;
use super::kernels::PlKernel;
use super::spectrum::{Spectrum, VoicePattern, VoiceTimbre};
use crate::error::{Error, Result};
use crate::grid::{BinRange, LogFreqGrid};
use super::round_span;

#[derive(Clone, Debug)]
pub struct ResponseTables {
    grid: LogFreqGrid,
    band: BinRange,
    timbre: VoiceTimbre,
    hp: HarmonicityParams,
    h: Vec<f64>,
    r: Vec<f64>,
}

impl ResponseTables {
    pub fn build(
        grid: &LogFreqGrid,
        band: BinRange,
        timbre: &VoiceTimbre,
        hp: &HarmonicityParams,
    ) -> Result<Self> {
        let pattern = VoicePattern::new(grid, timbre);
        let n = grid.n_bins() as i64;
        let w = band.len();
        let reach = (band.hi - band.lo) as i64;
        if band.hi as i64 + pattern.max_offset() >= n || (band.lo as i64) + pattern.min_offset() < 0 {
            return Err(Error::Domain(format!(
                "band {}..={} leaves no headroom for the voice partials on a {}-bin grid",
                band.lo, band.hi, n
            )));
        }
        // Harmonicity is translation invariant: one template of a voice at the
        // anchor serves every row. It is computed on a wider grid so that
        // offsets of up to a full band width are not cut off.
        let reach_oct = reach as f64 / grid.bins_per_octave();
        let wide = round_span(
            grid.f_ref(),
            reach_oct
                + (hp.order.max(1) as f64).log2()
                + (timbre.n_partials.max(1) as f64).log2()
                + 0.1,
        )?;
        let wide = LogFreqGrid::new(wide.f_ref(), wide.span_oct(), grid.bin_ct())?;
        let wide_pattern = VoicePattern::new(&wide, timbre);
        let wa = wide.anchor_bin() as i64;
        let mut energy = vec![0.0; wide.n_bins()];
        wide_pattern.deposit(&mut energy, wa as usize, 1.0);
        let template = harmonicity(&Spectrum::from_energy(wide, energy)?, hp)?;
        let mut h = vec![0.0; w * w];
        for (vi, v) in band.iter().enumerate() {
            let row = &mut h[vi * w..(vi + 1) * w];
            for (xi, x) in band.iter().enumerate() {
                row[xi] = template[(wa + x as i64 - v as i64) as usize];
            }
        }

        // Roughness is not (the ERB map warps frequency), so rows are built directly
        // from a probe-by-bin kernel matrix.
        let erb = erb_rates(grid);
        let kernel = PlKernel::new();
        let j_lo = (band.lo as i64 + pattern.min_offset()) as usize;
        let j_hi = (band.hi as i64 + pattern.max_offset()) as usize;
        let cols = j_hi - j_lo + 1;
        let mut g = vec![0.0; w * cols];
        for (xi, x) in band.iter().enumerate() {
            let zx = erb[x];
            for (c, zj) in erb[j_lo..=j_hi].iter().enumerate() {
                g[xi * cols + c] = kernel.eval(zx - zj);
            }
        }
        let mut r = vec![0.0; w * w];
        for (vi, v) in band.iter().enumerate() {
            let row = &mut r[vi * w..(vi + 1) * w];
            for (xi, out) in row.iter_mut().enumerate() {
                let gx = &g[xi * cols..(xi + 1) * cols];
                let mut acc = 0.0;
                for &(off, amp) in pattern.taps() {
                    acc += amp * gx[(v as i64 + off) as usize - j_lo];
                }
                *out = acc;
            }
        }
        Ok(Self {
            grid: *grid,
            band,
            timbre: *timbre,
            hp: *hp,
            h,
            r,
        })
    }

    pub fn grid(&self) -> &LogFreqGrid {
        &self.grid
    }

    pub fn band(&self) -> BinRange {
        self.band
    }

    pub fn timbre(&self) -> &VoiceTimbre {
        &self.timbre
    }

    pub fn harmonicity_params(&self) -> &HarmonicityParams {
        &self.hp
    }

    /// Raw H over the band of a voice at `voice`.
    pub fn h_row(&self, voice: usize) -> &[f64] {
        let w = self.band.len();
        let vi = voice - self.band.lo;
        &self.h[vi * w..(vi + 1) * w]
    }

    pub fn r_row(&self, voice: usize) -> &[f64] {
        let w = self.band.len();
        let vi = voice - self.band.lo;
        &self.r[vi * w..(vi + 1) * w]
    }

    #[inline]
    pub fn h(&self, voice: usize, probe: usize) -> f64 {
        let w = self.band.len();
        self.h[(voice - self.band.lo) * w + probe - self.band.lo]
    }

    #[inline]
    pub fn r(&self, voice: usize, probe: usize) -> f64 {
        let w = self.band.len();
        self.r[(voice - self.band.lo) * w + probe - self.band.lo]
    }

    /// Raw (H, R) at `probe` for voices at `bins`.
    pub fn raw_at<I: IntoIterator<Item = usize>>(&self, bins: I, probe: usize) -> (f64, f64) {
        let mut h = 0.0;
        let mut r = 0.0;
        for v in bins {
            h += self.h(v, probe);
            r += self.r(v, probe);
        }
        (h, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::roughness::roughness;
    use crate::landscape::spectrum::{deposit_voices, Voice};

    #[test]
    fn rows_match_direct_fields() {
        let hp = HarmonicityParams::default();
        let grid = crate::landscape::grid_for_band(220.0, 0.5, &VoiceTimbre::default(), &hp).unwrap();
        let band = grid.band(0.5);
        let t = VoiceTimbre::default();
        let tables = ResponseTables::build(&grid, band, &t, &hp).unwrap();
        for v in [band.lo, grid.anchor_bin() + 37, band.hi] {
            let s = deposit_voices(&grid, &[Voice::new(v)]).unwrap();
            let h = harmonicity(&s, &hp).unwrap();
            let r = roughness(&s);
            for x in band.iter().step_by(7) {
                assert!((tables.h(v, x) - h[x]).abs() <= 1e-12 * h[x].abs().max(1.0));
                assert!((tables.r(v, x) - r[x]).abs() <= 1e-12 * r[x].abs().max(1.0));
            }
        }
    }

    #[test]
    fn refuses_band_without_headroom() {
        let grid = LogFreqGrid::with_span(2.0);
        let err = ResponseTables::build(
            &grid,
            grid.band(2.0),
            &VoiceTimbre::default(),
            &HarmonicityParams::default(),
        );
        assert!(err.is_err());
    }
}
