//! Population-level consonance summaries.

use serde::{Deserialize, Serialize};

use crate::agents::{loo_c, Agent};
use crate::error::{Error, Result};
use crate::landscape::{consonance_core, ConsonanceCoeffs};
use crate::scene::Scene;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SocialConsonance {
    pub h_soc: f64,
    pub r_soc: f64,
    pub g: f64,
}

/// Band-mean H01/R01 of the agents' mix minus the mean of their singleton
/// band means, combined with the field coefficients. Fixed voices are not
/// part of the mix.
pub fn scene_consonance_g(scene: &Scene, bins: &[usize]) -> Result<SocialConsonance> {
    if bins.is_empty() {
        return Err(Error::Empty("population"));
    }
    let tables = scene.tables();
    let cal = scene.calibration();
    let w = scene.band().len();
    let mut mix_h = vec![0.0; w];
    let mut mix_r = vec![0.0; w];
    let mut solo_h = 0.0;
    let mut solo_r = 0.0;
    for &b in bins {
        let (hr, rr) = (tables.h_row(b), tables.r_row(b));
        let mut sh = 0.0;
        let mut sr = 0.0;
        for k in 0..w {
            mix_h[k] += hr[k];
            mix_r[k] += rr[k];
            sh += cal.h01(hr[k]);
            sr += cal.r01(rr[k]);
        }
        solo_h += sh / w as f64;
        solo_r += sr / w as f64;
    }
    let n = bins.len() as f64;
    let band_h = mix_h.iter().map(|&v| cal.h01(v)).sum::<f64>() / w as f64;
    let band_r = mix_r.iter().map(|&v| cal.r01(v)).sum::<f64>() / w as f64;
    let h_soc = band_h - solo_h / n;
    let r_soc = band_r - solo_r / n;
    let f = ConsonanceCoeffs::FIELD;
    Ok(SocialConsonance {
        h_soc,
        r_soc,
        g: consonance_core(h_soc, r_soc, &f) - f.d,
    })
}

/// Mean leave-one-out `C_field` of live agents at their own bins.
pub fn c_score_mean(scene: &Scene, agents: &[Agent]) -> Result<f64> {
    let live: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].alive).collect();
    if live.is_empty() {
        return Err(Error::Empty("population"));
    }
    Ok(live
        .iter()
        .map(|&i| loo_c(scene, agents, i, agents[i].pitch_bin))
        .sum::<f64>()
        / live.len() as f64)
}
