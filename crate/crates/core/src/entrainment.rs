//! Phase oscillators pulled toward a condition-specific drive.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifecycle::TICK_DT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveCondition {
    Shared,
    Scrambled,
    Off,
}

impl DriveCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Shared => "shared",
            Self::Scrambled => "scrambled",
            Self::Off => "off",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorParams {
    pub k_base: f64,
    pub f0_hz: f64,
    pub jitter: f64,
    pub drive_hz: f64,
    pub duration_s: f64,
    pub dt: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            k_base: 3.0,
            f0_hz: 1.8,
            jitter: 0.02,
            drive_hz: 2.0,
            duration_s: 40.0,
            dt: TICK_DT,
        }
    }
}

impl OscillatorParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.k_base >= 0.0
            && self.f0_hz > 0.0
            && (0.0..1.0).contains(&self.jitter)
            && self.drive_hz > 0.0
            && self.duration_s > 0.0
            && self.dt > 0.0;
        if !ok {
            return Err(Error::Config(format!("oscillator parameters out of range: {self:?}")));
        }
        let w_max = TAU * self.f0_hz * (1.0 + self.jitter);
        if (w_max + self.k_base) * self.dt >= 0.5 {
            return Err(Error::Config("oscillator dt too coarse for Euler stepping".into()));
        }
        Ok(())
    }

    pub fn n_ticks(&self) -> usize {
        (self.duration_s / self.dt).round() as usize
    }

    /// `omega = 2 pi f0 (1 + j)` with `j` uniform in `±jitter`.
    pub fn draw_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let j = rng.random_range(-self.jitter..=self.jitter);
        TAU * self.f0_hz * (1.0 + j)
    }

    /// Steady-state lag `theta* - phi` of a locked oscillator, if it locks.
    pub fn locked_lag(&self, omega: f64) -> Option<f64> {
        let s = (TAU * self.drive_hz - omega) / self.k_base;
        (s.abs() <= 1.0).then(|| s.asin())
    }
}

/// Drive phase generator. The scrambled condition adds an offset redrawn at
/// every drive-cycle boundary; all agents read the same drive.
#[derive(Clone, Debug)]
pub struct Drive {
    condition: DriveCondition,
    drive_hz: f64,
    cycle: Option<u64>,
    offset: f64,
}

impl Drive {
    pub fn new(condition: DriveCondition, drive_hz: f64) -> Self {
        Self {
            condition,
            drive_hz,
            cycle: None,
            offset: 0.0,
        }
    }

    pub fn phase<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Option<f64> {
        let base = TAU * self.drive_hz * t;
        match self.condition {
            DriveCondition::Off => None,
            DriveCondition::Shared => Some(base.rem_euclid(TAU)),
            DriveCondition::Scrambled => {
                let n = (t * self.drive_hz).floor() as u64;
                if self.cycle != Some(n) {
                    self.cycle = Some(n);
                    self.offset = rng.random_range(0.0..TAU);
                }
                Some((base + self.offset).rem_euclid(TAU))
            }
        }
    }
}

/// Euler step of `dphi/dt = omega + K sin(theta* - phi)`, wrapped to `[0, 2pi)`.
pub fn phase_step(phi: f64, omega: f64, theta_star: Option<f64>, k: f64, dt: f64) -> f64 {
    let pull = theta_star.map_or(0.0, |th| k * (th - phi).sin());
    let next = (phi + (omega + pull) * dt).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if next >= TAU {
        0.0
    } else {
        next
    }
}

/// Times of upward wraps of an unwrapped-by-step phase through 0, linearly
/// interpolated. `trace[n]` is the phase at `t0 + n*dt`.
pub fn extract_onsets(trace: &[f64], t0: f64, dt: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for n in 1..trace.len() {
        let (a, b) = (trace[n - 1], trace[n]);
        // forward increment through the wrap
        let inc = (b - a).rem_euclid(TAU);
        if inc > 0.0 && inc < std::f64::consts::PI && a + inc >= TAU {
            let frac = (TAU - a) / inc;
            out.push(t0 + (n as f64 - 1.0 + frac) * dt);
        }
    }
    out
}
