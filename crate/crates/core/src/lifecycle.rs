//! Energy metabolism, death and respawn.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{crowding_sum, loo_c, propose_within, Agent, SearchParams, SweepMode};
use crate::error::{Error, Result};
use crate::grid::BinRange;
use crate::scene::Scene;

/// Hop length of one tick: 512 samples at 48 kHz.
pub const TICK_DT: f64 = 512.0 / 48_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetabolicVariant {
    Selection,
    Hereditary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetabolicParams {
    pub variant: MetabolicVariant,
    pub c_b: f64,
    pub r_e: f64,
    pub e0: f64,
    pub e_cap: f64,
    pub dt: f64,
}

impl MetabolicParams {
    pub fn selection() -> Self {
        Self {
            variant: MetabolicVariant::Selection,
            c_b: 0.5,
            r_e: 0.4,
            e0: 1.0,
            e_cap: 1.0,
            dt: TICK_DT,
        }
    }

    pub fn hereditary() -> Self {
        Self {
            variant: MetabolicVariant::Hereditary,
            c_b: 0.12,
            r_e: 0.20,
            e0: 0.05,
            e_cap: 1.0,
            dt: TICK_DT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_b > 0.0 && self.r_e >= 0.0 && self.e0 > 0.0 && self.dt > 0.0) {
            return Err(Error::Config(format!("metabolism parameters out of range: {self:?}")));
        }
        if !(self.e_cap >= self.e0) {
            return Err(Error::Config("metabolism.e_cap must be at least e0".into()));
        }
        Ok(())
    }

    /// Lifetime in ticks of an agent that never recharges.
    pub fn starvation_ticks(&self) -> u64 {
        (self.e0 / (self.c_b * self.dt)).ceil() as u64
    }

    /// One Euler tick of whichever variant this is.
    pub fn tick(&self, e: f64, c_score: f64) -> f64 {
        match self.variant {
            MetabolicVariant::Selection => tick_energy_selection(e, c_score, self),
            MetabolicVariant::Hereditary => tick_energy_hereditary(e, c_score, self),
        }
    }
}

/// `E - c_b dt + r_E max(0, C) dt`, capped at `E_cap`.
pub fn tick_energy_selection(e: f64, c_score: f64, p: &MetabolicParams) -> f64 {
    (e - p.c_b * p.dt + p.r_e * c_score.max(0.0) * p.dt).min(p.e_cap)
}

pub fn survival_signal(c_score: f64) -> f64 {
    ((c_score - 0.30) / (0.80 - 0.30)).clamp(0.0, 1.0)
}

pub fn tick_energy_hereditary(e: f64, c_score: f64, p: &MetabolicParams) -> f64 {
    (e - p.c_b * p.dt + p.r_e * survival_signal(c_score) * p.dt).min(p.e_cap)
}

pub fn is_dead(e: f64) -> bool {
    e <= 0.0
}

pub fn vitality(e: f64, e_cap: f64) -> Result<f64> {
    if e < 0.0 || e.is_nan() {
        return Err(Error::Domain(format!("energy must be non-negative, got {e}")));
    }
    Ok((e / e_cap).min(1.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifetimeRecord {
    pub agent: usize,
    pub lineage: usize,
    pub birth_tick: u64,
    pub death_tick: u64,
    pub lifetime_ticks: u64,
    pub c_first_k: f64,
    pub final_bin: usize,
}

/// Accumulates the early-life consonance window.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EarlyWindow {
    sum: f64,
    n: usize,
}

impl EarlyWindow {
    pub fn push(&mut self, value: f64, k: usize) {
        if self.n < k {
            self.sum += value;
            self.n += 1;
        }
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum / self.n as f64
        }
    }
}

/// Uniform in log frequency over `band`, which on a log grid is uniform over bins.
pub fn respawn_random<R: Rng + ?Sized>(band: BinRange, rng: &mut R) -> usize {
    rng.random_range(band.lo..=band.hi)
}

/// Leave-one-out score of a newborn in slot `i` at `x`: consonance minus crowding.
pub fn newborn_score(scene: &Scene, agents: &[Agent], i: usize, x: usize, p: &SearchParams) -> f64 {
    loo_c(scene, agents, i, x) - p.lambda_c * crowding_sum(scene, agents, i, x, p.kappa)
}

/// Bins where the newborn-LOO `C_field` beats both neighbours.
pub fn families(scene: &Scene, agents: &[Agent], i: usize) -> Vec<usize> {
    let band = scene.band();
    let field: Vec<f64> = band.iter().map(|x| loo_c(scene, agents, i, x)).collect();
    (1..field.len().saturating_sub(1))
        .filter(|&k| field[k] > field[k - 1] && field[k] > field[k + 1])
        .map(|k| band.lo + k)
        .collect()
}

/// Lineage-biased respawn: nearest family peak to the parent, then the best
/// bin within `window_ct` of that peak. Ties go to the lower pitch.
pub fn respawn_heredity<R: Rng + ?Sized>(
    parent_bin: usize,
    scene: &Scene,
    agents: &[Agent],
    i: usize,
    p: &SearchParams,
    window_ct: f64,
    rng: &mut R,
) -> usize {
    let peaks = families(scene, agents, i);
    let Some(&peak) = peaks.iter().min_by_key(|&&b| (b.abs_diff(parent_bin), b)) else {
        return respawn_random(scene.band(), rng);
    };
    let band = scene.band();
    let w = (window_ct / scene.grid().bin_ct()).round() as usize;
    let lo = peak.saturating_sub(w).max(band.lo);
    let hi = (peak + w).min(band.hi);
    best_of(scene, agents, i, p, lo..=hi)
}

/// `m` log-uniform candidates, keep the one with the best newborn score.
pub fn respawn_matched_random<R: Rng + ?Sized>(
    scene: &Scene,
    agents: &[Agent],
    i: usize,
    p: &SearchParams,
    m: usize,
    rng: &mut R,
) -> usize {
    let band = scene.band();
    let cands: Vec<usize> = (0..m.max(1)).map(|_| respawn_random(band, rng)).collect();
    best_of(scene, agents, i, p, cands)
}

fn best_of<I: IntoIterator<Item = usize>>(scene: &Scene, agents: &[Agent], i: usize, p: &SearchParams, cands: I) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for x in cands {
        let s = newborn_score(scene, agents, i, x, p);
        best = match best {
            Some((bx, bs)) if bs > s || (bs == s && bx <= x) => Some((bx, bs)),
            _ => Some((x, s)),
        };
    }
    best.expect("at least one candidate").0
}

/// Short Metropolis settle of a newborn at `T0`, confined to one step window
/// around where it spawned. Nobody else moves.
pub fn settle_newborn<R: Rng + ?Sized>(
    scene: &Scene,
    agents: &mut [Agent],
    i: usize,
    p: &SearchParams,
    ticks: usize,
    rng: &mut R,
) {
    let w = p.step_bins(scene.grid().bin_ct());
    let band = scene.band();
    let spawn = agents[i].pitch_bin;
    let lo = spawn.saturating_sub(w).max(band.lo);
    let hi = (spawn + w).min(band.hi);
    for _ in 0..ticks {
        propose_within(scene, agents, i, p.t0, 1.0, p, SweepMode::LocalSearch, w, lo, hi, rng);
    }
}
