//! Exact leave-one-out evaluation of a live population.
//!
//! A [`Scene`] pairs shared [`ResponseTables`] with a per-run calibration, the
//! fixed voices (the reference drone) and, for the terrain control, a frozen
//! permutation of the evaluation bins. Every consonance value it hands out is
//! counted so runs can check how often calibration clipped.

use std::cell::Cell;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{BinRange, LogFreqGrid};
use crate::landscape::{erb_rates, BinPermutation, Calibration, ConsonanceCoeffs, ResponseTables};
use crate::landscape::consonance_core;

/// Running clip counters and the largest raw values seen.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClipStats {
    pub evaluations: u64,
    pub clipped: u64,
    pub max_h_raw: f64,
    pub max_r_raw: f64,
}

impl ClipStats {
    pub fn fraction(&self) -> f64 {
        if self.evaluations == 0 {
            0.0
        } else {
            self.clipped as f64 / self.evaluations as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scene {
    tables: Arc<ResponseTables>,
    cal: Calibration,
    fixed: Vec<usize>,
    erb: Vec<f64>,
    perm: Option<BinPermutation>,
    stats: Cell<ClipStats>,
}

impl Scene {
    pub fn new(tables: Arc<ResponseTables>, cal: Calibration, fixed: Vec<usize>) -> Result<Self> {
        let band = tables.band();
        if let Some(&b) = fixed.iter().find(|&&b| !band.contains(b)) {
            return Err(Error::Domain(format!("fixed voice at bin {b} is outside the band")));
        }
        let erb = erb_rates(tables.grid());
        Ok(Self {
            tables,
            cal,
            fixed,
            erb,
            perm: None,
            stats: Cell::new(ClipStats::default()),
        })
    }

    /// Evaluates bin `x` by reading the field at `perm.source(x)` (band-relative).
    pub fn with_permutation(mut self, perm: BinPermutation) -> Result<Self> {
        if perm.len() != self.tables.band().len() {
            return Err(Error::Domain(format!(
                "permutation covers {} bins, band has {}",
                perm.len(),
                self.tables.band().len()
            )));
        }
        self.perm = Some(perm);
        Ok(self)
    }

    pub fn tables(&self) -> &Arc<ResponseTables> {
        &self.tables
    }

    pub fn grid(&self) -> &LogFreqGrid {
        self.tables.grid()
    }

    pub fn band(&self) -> BinRange {
        self.tables.band()
    }

    pub fn calibration(&self) -> &Calibration {
        &self.cal
    }

    pub fn fixed_voices(&self) -> &[usize] {
        &self.fixed
    }

    pub fn is_shuffled(&self) -> bool {
        self.perm.is_some()
    }

    #[inline]
    pub fn erb(&self, bin: usize) -> f64 {
        self.erb[bin]
    }

    pub fn clip_stats(&self) -> ClipStats {
        self.stats.get()
    }

    pub fn reset_clip_stats(&self) {
        self.stats.set(ClipStats::default());
    }

    #[inline]
    fn eval_bin(&self, probe: usize) -> usize {
        match &self.perm {
            Some(p) => {
                let lo = self.band().lo;
                lo + p.source(probe - lo)
            }
            None => probe,
        }
    }

    /// Raw (H, R) at `probe` from `voices` plus the fixed voices, no permutation.
    pub fn raw_with<I: IntoIterator<Item = usize>>(&self, voices: I, probe: usize) -> (f64, f64) {
        let (mut h, mut r) = self.tables.raw_at(self.fixed.iter().copied(), probe);
        for v in voices {
            h += self.tables.h(v, probe);
            r += self.tables.r(v, probe);
        }
        (h, r)
    }

    /// `C_field` read at `probe` for a scene made of `voices` plus the fixed
    /// voices. The caller leaves out whoever is being scored.
    pub fn c_field_with<I: IntoIterator<Item = usize>>(&self, voices: I, probe: usize) -> f64 {
        let (h, r) = self.raw_with(voices, self.eval_bin(probe));
        self.record(h, r);
        consonance_core(self.cal.h01(h), self.cal.r01(r), &ConsonanceCoeffs::FIELD)
    }

    fn record(&self, h: f64, r: f64) {
        let mut s = self.stats.get();
        s.evaluations += 1;
        if h > self.cal.h_ref || r > self.cal.r_ref {
            s.clipped += 1;
        }
        s.max_h_raw = s.max_h_raw.max(h);
        s.max_r_raw = s.max_r_raw.max(r);
        self.stats.set(s);
    }
}

/// Calibration taken from the band maxima of a donor scene (all `voices`
/// plus `fixed`). Falls back to `floor` where the donor is weaker.
pub fn maxima_calibration(
    tables: &ResponseTables,
    voices: &[usize],
    fixed: &[usize],
    floor: &Calibration,
) -> Result<Calibration> {
    let mut hm = floor.h_ref;
    let mut rm = floor.r_ref;
    for x in tables.band().iter() {
        let (h, r) = tables.raw_at(voices.iter().chain(fixed).copied(), x);
        hm = hm.max(h);
        rm = rm.max(r);
    }
    Calibration::new(hm, rm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{build_fields, deposit_voices, grid_for_band, HarmonicityParams, LevelParams, Voice, VoiceTimbre};

    fn setup() -> (Arc<ResponseTables>, Calibration) {
        let t = VoiceTimbre::default();
        let hp = HarmonicityParams::default();
        let grid = grid_for_band(220.0, 0.5, &t, &hp).unwrap();
        let band = grid.band(0.5);
        let tables = ResponseTables::build(&grid, band, &t, &hp).unwrap();
        let cal = Calibration::reference(&grid, &t, &hp).unwrap();
        (Arc::new(tables), cal)
    }

    #[test]
    fn loo_matches_rebuild() {
        let (tables, cal) = setup();
        let grid = *tables.grid();
        let band = tables.band();
        let drone = grid.anchor_bin();
        let scene = Scene::new(tables.clone(), cal, vec![drone]).unwrap();
        let bins = [band.lo + 3, band.lo + 60, band.hi - 10];
        let voices: Vec<Voice> = [bins[0], bins[2], drone].iter().map(|&b| Voice::new(b)).collect();
        let s = deposit_voices(&grid, &voices).unwrap();
        let f = build_fields(&s, tables.harmonicity_params(), &cal, &LevelParams::default()).unwrap();
        for probe in [band.lo, bins[1], band.hi] {
            let got = scene.c_field_with([bins[0], bins[2]], probe);
            assert!((got - f.c_field[probe]).abs() < 1e-12);
        }
        assert_eq!(scene.clip_stats().evaluations, 3);
    }

    #[test]
    fn permutation_reads_source_bin() {
        let (tables, cal) = setup();
        let band = tables.band();
        let n = band.len();
        let plain = Scene::new(tables.clone(), cal, vec![]).unwrap();
        let perm = BinPermutation::from_seed(n, 3);
        let shuffled = Scene::new(tables.clone(), cal, vec![]).unwrap().with_permutation(perm.clone()).unwrap();
        let bins = [band.lo + 40];
        let x = band.lo + 7;
        let want = plain.c_field_with(bins, band.lo + perm.source(7));
        assert_eq!(shuffled.c_field_with(bins, x), want);
    }

    #[test]
    fn maxima_calibration_removes_clipping() {
        let (tables, cal) = setup();
        let band = tables.band();
        let bins: Vec<usize> = band.iter().step_by(13).collect();
        let cal2 = maxima_calibration(&tables, &bins, &[], &cal).unwrap();
        let scene = Scene::new(tables.clone(), cal2, vec![]).unwrap();
        for x in band.iter() {
            scene.c_field_with(bins.iter().copied(), x);
        }
        assert_eq!(scene.clip_stats().clipped, 0);
        assert!(cal2.r_ref >= cal.r_ref);
    }
}
