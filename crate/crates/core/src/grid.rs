//! Discretized log2-frequency axis.
//!
//! Bins are equally spaced in cents and centered on a reference frequency, so
//! a shift by an integer number of bins is an exact frequency ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CENTS_PER_OCTAVE: f64 = 1200.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFreqGrid {
    f_ref: f64,
    span_oct: f64,
    bin_ct: f64,
    half: usize,
}

impl LogFreqGrid {
    /// Grid spanning `span_oct` octaves below and above `f_ref` with bins of
    /// `bin_ct` cents.
    pub fn new(f_ref: f64, span_oct: f64, bin_ct: f64) -> Result<Self> {
        if !(f_ref > 0.0 && f_ref.is_finite()) {
            return Err(Error::Domain(format!("reference frequency must be > 0, got {f_ref}")));
        }
        if !(span_oct > 0.0 && span_oct.is_finite()) {
            return Err(Error::Domain(format!("span must be > 0 octaves, got {span_oct}")));
        }
        if !(bin_ct > 0.0 && bin_ct.is_finite()) {
            return Err(Error::Domain(format!("bin width must be > 0 cents, got {bin_ct}")));
        }
        // Small epsilon so that e.g. 2 oct / 3 ct lands on 800, not 799.
        let half = (span_oct * CENTS_PER_OCTAVE / bin_ct + 1e-9).floor() as usize;
        Ok(Self {
            f_ref,
            span_oct,
            bin_ct,
            half,
        })
    }

    /// 220 Hz anchor, 3 ct bins.
    pub fn with_span(span_oct: f64) -> Self {
        Self::new(220.0, span_oct, 3.0).expect("default grid parameters are valid")
    }

    pub fn f_ref(&self) -> f64 {
        self.f_ref
    }

    pub fn span_oct(&self) -> f64 {
        self.span_oct
    }

    pub fn bin_ct(&self) -> f64 {
        self.bin_ct
    }

    /// Always odd; the anchor sits in the middle.
    pub fn n_bins(&self) -> usize {
        2 * self.half + 1
    }

    pub fn anchor_bin(&self) -> usize {
        self.half
    }

    pub fn bins_per_octave(&self) -> f64 {
        CENTS_PER_OCTAVE / self.bin_ct
    }

    pub fn cents(&self, bin: usize) -> f64 {
        (bin as f64 - self.half as f64) * self.bin_ct
    }

    /// Position in log2(f) units relative to the anchor (octaves).
    pub fn octaves(&self, bin: usize) -> f64 {
        self.cents(bin) / CENTS_PER_OCTAVE
    }

    pub fn freq(&self, bin: usize) -> f64 {
        self.f_ref * (self.octaves(bin)).exp2()
    }

    /// Nearest bin to a cents offset from the anchor, if it lies on the grid.
    pub fn bin_of_cents(&self, cents: f64) -> Option<usize> {
        let idx = (cents / self.bin_ct).round() + self.half as f64;
        if idx < 0.0 || idx > (self.n_bins() - 1) as f64 || !idx.is_finite() {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub fn bin_of_freq(&self, f: f64) -> Option<usize> {
        if f <= 0.0 {
            return None;
        }
        self.bin_of_cents(CENTS_PER_OCTAVE * (f / self.f_ref).log2())
    }

    /// Inclusive bin range covering `±oct` around the anchor, clipped to the grid.
    pub fn band(&self, oct: f64) -> BinRange {
        let k = (oct * CENTS_PER_OCTAVE / self.bin_ct + 1e-9).floor() as usize;
        let k = k.min(self.half);
        BinRange::new(self.half - k, self.half + k)
    }

    /// Bin-index offset corresponding to a frequency ratio (fractional).
    pub fn ratio_offset(&self, ratio: f64) -> f64 {
        ratio.log2() * self.bins_per_octave()
    }
}

/// Inclusive range of grid bins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinRange {
    pub lo: usize,
    pub hi: usize,
}

impl BinRange {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty bin range {lo}..={hi}");
        Self { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, bin: usize) -> bool {
        bin >= self.lo && bin <= self.hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_count_matches_span() {
        assert_eq!(LogFreqGrid::with_span(2.0).n_bins(), 1601);
        assert_eq!(LogFreqGrid::with_span(1.0).n_bins(), 801);
        let g = LogFreqGrid::new(440.0, 0.5, 5.0).unwrap();
        assert_eq!(g.n_bins(), 241);
        assert_eq!(g.n_bins() % 2, 1);
    }

    #[test]
    fn cents_roundtrip_is_exact() {
        let g = LogFreqGrid::with_span(2.0);
        for bin in 0..g.n_bins() {
            assert_eq!(g.bin_of_cents(g.cents(bin)), Some(bin));
        }
        assert_eq!(g.cents(g.anchor_bin()), 0.0);
        assert!((g.freq(g.anchor_bin()) - 220.0).abs() < 1e-12);
        assert!((g.freq(g.anchor_bin() + 400) - 440.0).abs() < 1e-9);
    }

    #[test]
    fn off_grid_is_none() {
        let g = LogFreqGrid::with_span(1.0);
        assert_eq!(g.bin_of_cents(1203.0), None);
        assert_eq!(g.bin_of_cents(-1203.0), None);
        assert_eq!(g.bin_of_freq(0.0), None);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LogFreqGrid::new(-1.0, 1.0, 3.0).is_err());
        assert!(LogFreqGrid::new(220.0, 0.0, 3.0).is_err());
        assert!(LogFreqGrid::new(220.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn band_is_symmetric() {
        let g = LogFreqGrid::with_span(5.5);
        let b = g.band(2.0);
        assert_eq!(b.len(), 1601);
        assert_eq!(g.cents(b.lo), -2400.0);
        assert_eq!(g.cents(b.hi), 2400.0);
    }
}
