//! Pitch adaptation: local proposals scored against the leave-one-out
//! landscape, a crowding penalty, and Metropolis acceptance under an
//! annealed temperature.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::kernels::PlKernel;
use crate::landscape::PL_PEAK_ERB;
use crate::scene::Scene;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: usize,
    pub pitch_bin: usize,
    pub energy: f64,
    pub phase: f64,
    pub omega: f64,
    pub lineage_id: usize,
    pub alive: bool,
    pub birth_tick: u64,
}

impl Agent {
    pub fn new(id: usize, pitch_bin: usize) -> Self {
        Self {
            id,
            pitch_bin,
            energy: 1.0,
            phase: 0.0,
            omega: 0.0,
            lineage_id: id,
            alive: true,
            birth_tick: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchParams {
    pub step_ct: f64,
    pub lambda_c: f64,
    pub lambda_m: f64,
    pub kappa: f64,
    pub t0: f64,
    pub tau_sweeps: f64,
    pub n_sweeps: usize,
    pub switch_sweep: usize,
    pub burn_in_sweeps: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            step_ct: 25.0,
            lambda_c: 0.6,
            lambda_m: 0.1,
            kappa: 2.1,
            t0: 0.05,
            tau_sweeps: 4.8,
            n_sweeps: 8,
            switch_sweep: 4,
            burn_in_sweeps: 2,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("step_ct", self.step_ct),
            ("kappa", self.kappa),
            ("t0", self.t0),
            ("tau_sweeps", self.tau_sweeps),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("search.{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("lambda_c", self.lambda_c), ("lambda_m", self.lambda_m)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("search.{name} must be non-negative, got {v}")));
            }
        }
        if self.n_sweeps == 0 || self.switch_sweep >= self.n_sweeps {
            return Err(Error::Config(format!(
                "search.switch_sweep ({}) must be below n_sweeps ({})",
                self.switch_sweep, self.n_sweeps
            )));
        }
        if self.burn_in_sweeps >= self.n_sweeps {
            return Err(Error::Config("search.burn_in_sweeps must be below n_sweeps".into()));
        }
        Ok(())
    }

    /// Proposal half-width in grid bins.
    pub fn step_bins(&self, bin_ct: f64) -> usize {
        ((self.step_ct / bin_ct).round() as usize).max(1)
    }
}

/// Crowding penalty at ERB distance `d`: `1 - g(d/kappa)` up to the first
/// zero at `kappa * 0.25` ERB, and 0 from there on.
pub fn crowding_kernel(d_erb: f64, kappa: f64) -> f64 {
    let d = d_erb.abs();
    if d >= kappa * PL_PEAK_ERB {
        return 0.0;
    }
    (1.0 - PlKernel::new().eval(d / kappa)).max(0.0)
}

/// Total crowding felt by slot `i` if it sat at `candidate`.
pub fn crowding_sum(scene: &Scene, agents: &[Agent], i: usize, candidate: usize, kappa: f64) -> f64 {
    let z = scene.erb(candidate);
    let kernel = PlKernel::new();
    let reach = kappa * PL_PEAK_ERB;
    agents
        .iter()
        .enumerate()
        .filter(|&(j, a)| a.alive && j != i)
        .map(|(_, a)| {
            let d = (z - scene.erb(a.pitch_bin)).abs();
            if d >= reach {
                0.0
            } else {
                (1.0 - kernel.eval(d / kappa)).max(0.0)
            }
        })
        .sum()
}

/// Bins of every live agent except slot `skip`.
pub fn other_bins(agents: &[Agent], skip: usize) -> impl Iterator<Item = usize> + '_ {
    agents
        .iter()
        .enumerate()
        .filter(move |&(j, a)| a.alive && j != skip)
        .map(|(_, a)| a.pitch_bin)
}

/// Exact leave-one-out `C_field` of slot `i` evaluated at `probe`.
pub fn loo_c(scene: &Scene, agents: &[Agent], i: usize, probe: usize) -> f64 {
    scene.c_field_with(other_bins(agents, i), probe)
}

/// `S = C_loo - lambda_C * sum K - lambda_M * |dx|`, with `dx` in octaves
/// measured from the agent's current bin.
pub fn loo_score(scene: &Scene, agents: &[Agent], i: usize, candidate: usize, p: &SearchParams) -> f64 {
    let c = loo_c(scene, agents, i, candidate);
    let crowd = crowding_sum(scene, agents, i, candidate, p.kappa);
    let grid = scene.grid();
    let dx = (grid.octaves(candidate) - grid.octaves(agents[i].pitch_bin)).abs();
    c - p.lambda_c * crowd - p.lambda_m * dx
}

/// `min(1, exp(dS / T))`.
pub fn acceptance_probability(delta_s: f64, temperature: f64) -> f64 {
    if delta_s >= 0.0 {
        1.0
    } else {
        (delta_s / temperature).exp()
    }
}

pub fn anneal_temperature(sweep: usize, p: &SearchParams) -> f64 {
    let s = if sweep < p.switch_sweep {
        sweep
    } else {
        sweep - p.switch_sweep
    };
    p.t0 * (-(s as f64) / p.tau_sweeps).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    LocalSearch,
    RandomWalk,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proposal {
    /// `None` when the drawn bin fell outside the band.
    pub candidate: Option<usize>,
    pub accepted: bool,
}

/// Draws an offset in `[-w, w] \ {0}`.
fn draw_offset<R: Rng + ?Sized>(w: usize, rng: &mut R) -> i64 {
    let w = w as i64;
    let d = rng.random_range(-w..w);
    if d >= 0 {
        d + 1
    } else {
        d
    }
}

/// One proposal for slot `i`. In random-walk mode every in-band candidate is
/// taken; otherwise Metropolis on `sign * S`.
#[allow(clippy::too_many_arguments)]
pub fn propose_and_accept<R: Rng + ?Sized>(
    scene: &Scene,
    agents: &mut [Agent],
    i: usize,
    temperature: f64,
    sign: f64,
    p: &SearchParams,
    mode: SweepMode,
    rng: &mut R,
) -> Proposal {
    let w = p.step_bins(scene.grid().bin_ct());
    let band = scene.band();
    propose_within(scene, agents, i, temperature, sign, p, mode, w, band.lo, band.hi, rng)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn propose_within<R: Rng + ?Sized>(
    scene: &Scene,
    agents: &mut [Agent],
    i: usize,
    temperature: f64,
    sign: f64,
    p: &SearchParams,
    mode: SweepMode,
    w: usize,
    lo: usize,
    hi: usize,
    rng: &mut R,
) -> Proposal {
    let cur = agents[i].pitch_bin;
    let x = cur as i64 + draw_offset(w, rng);
    if x < lo as i64 || x > hi as i64 {
        return Proposal {
            candidate: None,
            accepted: false,
        };
    }
    let x = x as usize;
    let accepted = match mode {
        SweepMode::RandomWalk => true,
        SweepMode::LocalSearch => {
            let s0 = sign * loo_score(scene, agents, i, cur, p);
            let s1 = sign * loo_score(scene, agents, i, x, p);
            let ds = s1 - s0;
            // The uniform draw is consumed either way so that the stream
            // position does not depend on the landscape.
            let u: f64 = rng.random();
            ds >= 0.0 || u < acceptance_probability(ds, temperature)
        }
    };
    if accepted {
        agents[i].pitch_bin = x;
    }
    Proposal {
        candidate: Some(x),
        accepted,
    }
}

/// One JSON-lines record per agent per sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEvent {
    pub sweep: usize,
    pub agent: usize,
    pub pitch_ct: f64,
    pub loo_c: f64,
    pub accepted: bool,
}

/// Visits live agents in shuffled order, one proposal each, then records
/// every agent's leave-one-out `C_field` at its final bin (ordered by id).
#[allow(clippy::too_many_arguments)]
pub fn run_sweep<R: Rng + ?Sized>(
    scene: &Scene,
    agents: &mut [Agent],
    sweep: usize,
    sign: f64,
    p: &SearchParams,
    mode: SweepMode,
    rng: &mut R,
) -> Vec<SweepEvent> {
    let t = anneal_temperature(sweep, p);
    let mut order: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].alive).collect();
    order.shuffle(rng);
    let mut accepted = vec![false; agents.len()];
    for i in order {
        accepted[i] = propose_and_accept(scene, agents, i, t, sign, p, mode, rng).accepted;
    }
    let grid = *scene.grid();
    (0..agents.len())
        .filter(|&i| agents[i].alive)
        .map(|i| SweepEvent {
            sweep,
            agent: agents[i].id,
            pitch_ct: grid.cents(agents[i].pitch_bin),
            loo_c: loo_c(scene, agents, i, agents[i].pitch_bin),
            accepted: accepted[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::landscape::{grid_for_band, pl_kernel, Calibration, HarmonicityParams, ResponseTables, VoiceTimbre};

    fn scene(band_oct: f64) -> Scene {
        let t = VoiceTimbre::default();
        let hp = HarmonicityParams::default();
        let grid = grid_for_band(220.0, band_oct, &t, &hp).unwrap();
        let tables = ResponseTables::build(&grid, grid.band(band_oct), &t, &hp).unwrap();
        let cal = Calibration::reference(&grid, &t, &hp).unwrap();
        Scene::new(Arc::new(tables), cal, vec![grid.anchor_bin()]).unwrap()
    }

    #[test]
    fn kernel_points() {
        assert_eq!(crowding_kernel(0.0, 2.1), 1.0);
        assert!(crowding_kernel(0.525, 2.1).abs() < 1e-12);
        assert_eq!(crowding_kernel(2.0, 2.1), 0.0);
        let mut prev = 1.0;
        for k in 1..=600 {
            let v = crowding_kernel(k as f64 * 1e-3, 2.1);
            assert!(v <= prev);
            prev = v;
        }
        // the literal complement would climb again past the first zero
        assert!(1.0 - pl_kernel(1.5 / 2.1) > 0.0);
    }

    #[test]
    fn temperatures() {
        let p = SearchParams::default();
        assert!((anneal_temperature(0, &p) - 0.05).abs() < 1e-15);
        assert!((anneal_temperature(4, &p) - 0.05).abs() < 1e-15);
        assert!((anneal_temperature(2, &p) - 0.032_962).abs() < 1e-6);
    }

    #[test]
    fn acceptance() {
        assert_eq!(acceptance_probability(0.0, 0.05), 1.0);
        assert_eq!(acceptance_probability(0.3, 0.05), 1.0);
        assert!((acceptance_probability(-0.05, 0.05) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fifth_beats_tritone() {
        let s = scene(1.0);
        let g = *s.grid();
        let p = SearchParams::default();
        let a = g.anchor_bin();
        let agents = vec![Agent::new(0, a + 234)];
        let fifth = loo_score(&s, &agents, 0, a + 234, &p);
        let mut tri = agents.clone();
        tri[0].pitch_bin = a + 200;
        let tritone = loo_score(&s, &tri, 0, a + 200, &p);
        assert!(fifth > tritone);
    }

    #[test]
    fn score_at_current_is_field_value() {
        let s = scene(1.0);
        let a = s.grid().anchor_bin();
        let p = SearchParams::default();
        let agents = vec![Agent::new(0, a + 100), Agent::new(1, a - 300)];
        let want = s.c_field_with([a - 300], a + 100);
        assert_eq!(loo_score(&s, &agents, 0, a + 100, &p), want);
    }

    #[test]
    fn unison_pair_crowding() {
        let s = scene(1.0);
        let a = s.grid().anchor_bin();
        let agents = vec![Agent::new(0, a + 50), Agent::new(1, a + 50)];
        assert_eq!(crowding_sum(&s, &agents, 0, a + 50, 2.1), 1.0);
        // the drone is not an agent
        let solo = vec![Agent::new(0, a)];
        assert_eq!(crowding_sum(&s, &solo, 0, a, 2.1), 0.0);
    }

    #[test]
    fn random_walk_step_bound() {
        let s = scene(1.0);
        let a = s.grid().anchor_bin();
        let p = SearchParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut agents = vec![Agent::new(0, a + 10)];
            run_sweep(&s, &mut agents, 0, 1.0, &p, SweepMode::RandomWalk, &mut rng);
            let d = agents[0].pitch_bin.abs_diff(a + 10);
            assert!((1..=8).contains(&d));
        }
    }

    #[test]
    fn events_in_id_order() {
        let s = scene(1.0);
        let a = s.grid().anchor_bin();
        let p = SearchParams::default();
        let mut agents: Vec<Agent> = (0..5).map(|i| Agent::new(i, a - 200 + 90 * i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ev = run_sweep(&s, &mut agents, 3, -1.0, &p, SweepMode::LocalSearch, &mut rng);
        assert_eq!(ev.iter().map(|e| e.agent).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        for (e, ag) in ev.iter().zip(&agents) {
            assert_eq!(e.loo_c, loo_c(&s, &agents, ag.id, ag.pitch_bin));
        }
    }

    #[test]
    fn validation() {
        assert!(SearchParams::default().validate().is_ok());
        let bad = SearchParams {
            switch_sweep: 8,
            ..SearchParams::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(SearchParams::default().step_bins(3.0), 8);
    }
}
