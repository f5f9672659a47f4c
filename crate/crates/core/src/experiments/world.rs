//! Shared per-experiment state and the per-run calibration loop.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{CalibrationMode, CalibrationPolicy, ExperimentConfig};
use crate::error::Result;
use crate::landscape::{grid_for_band, Calibration, ResponseTables};
use crate::scene::{maxima_calibration, ClipStats, Scene};

/// Response tables for the configured band plus the reference calibration.
/// Built once per experiment and shared by every run.
#[derive(Clone, Debug)]
pub struct World {
    pub tables: Arc<ResponseTables>,
    pub reference: Calibration,
    pub fixed: Vec<usize>,
}

impl World {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = grid_for_band(cfg.anchor_hz, cfg.band_oct, &cfg.timbre, &cfg.harmonicity)?;
        let band = grid.band(cfg.band_oct);
        let tables = ResponseTables::build(&grid, band, &cfg.timbre, &cfg.harmonicity)?;
        let reference = Calibration::reference(&grid, &cfg.timbre, &cfg.harmonicity)?;
        let fixed = if cfg.drone { vec![grid.anchor_bin()] } else { vec![] };
        Ok(Self {
            tables: Arc::new(tables),
            reference,
            fixed,
        })
    }

    pub fn scene(&self, cal: Calibration) -> Result<Scene> {
        Scene::new(self.tables.clone(), cal, self.fixed.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub h_ref: f64,
    pub r_ref: f64,
    pub passes: usize,
    pub evaluations: u64,
    pub clip_fraction: f64,
}

/// Runs `run` under a calibration taken from the initial scene's maxima and
/// repeats with raised divisors while it clips too often. In reference mode
/// the run happens once under the reference divisors.
pub fn calibrated<T>(
    world: &World,
    policy: &CalibrationPolicy,
    initial_bins: &[usize],
    mut run: impl FnMut(Calibration) -> Result<(T, ClipStats)>,
) -> Result<(T, CalibrationReport)> {
    let fixed = policy.mode == CalibrationMode::Reference;
    let mut cal = if fixed {
        world.reference
    } else {
        maxima_calibration(&world.tables, initial_bins, &world.fixed, &world.reference)?
    };
    let mut pass = 1;
    loop {
        let (value, clip) = run(cal)?;
        if fixed || clip.fraction() <= policy.max_clip_fraction || pass >= policy.max_passes {
            let report = CalibrationReport {
                h_ref: cal.h_ref,
                r_ref: cal.r_ref,
                passes: pass,
                evaluations: clip.evaluations,
                clip_fraction: clip.fraction(),
            };
            return Ok((value, report));
        }
        cal = Calibration::new(cal.h_ref.max(clip.max_h_raw), cal.r_ref.max(clip.max_r_raw))?;
        pass += 1;
    }
}
