//! Calibrated harmonicity/roughness fields and the bilinear consonance core.

use serde::{Deserialize, Serialize};

use super::harmonicity::{harmonicity, HarmonicityParams};
use super::kernels::{erb_rate_to_hz, erb_rate_unchecked, PL_PEAK_ERB};
use super::roughness::{erb_rates, roughness, roughness_at};
use super::spectrum::{deposit_voices, Spectrum, Voice, VoiceTimbre};
use crate::error::{Error, Result};
use crate::grid::LogFreqGrid;

/// Coefficients of `C = a·H + b·R + c·H·R + d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsonanceCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ConsonanceCoeffs {
    /// Evaluation field used by pitch adaptation and metabolism.
    pub const FIELD: Self = Self {
        a: 1.0,
        b: -1.35,
        c: 1.0,
        d: 0.0,
    };

    /// Nonnegative mass `H·(1 − R)`.
    pub const DENSITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: -1.0,
        d: 0.0,
    };
}

#[inline]
pub fn consonance_core(h01: f64, r01: f64, c: &ConsonanceCoeffs) -> f64 {
    c.a * h01 + c.b * r01 + c.c * h01 * r01 + c.d
}

/// Sigmoid level parameters for `C_level01 = σ(β·(C_field − θ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelParams {
    pub beta: f64,
    pub theta: f64,
}

impl Default for LevelParams {
    fn default() -> Self {
        Self { beta: 2.0, theta: 0.0 }
    }
}

#[inline]
pub fn c_level01(c_field: f64, beta: f64, theta: f64) -> f64 {
    1.0 / (1.0 + (-beta * (c_field - theta)).exp())
}

/// Fixed divisors mapping raw harmonicity/roughness onto `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub h_ref: f64,
    pub r_ref: f64,
}

impl Calibration {
    /// Reference calibration: raw H at the anchor bin of one voice sitting on
    /// the anchor, and raw R at the anchor for two voices 0.25 ERB apart.
    pub fn reference(
        grid: &LogFreqGrid,
        timbre: &VoiceTimbre,
        hp: &HarmonicityParams,
    ) -> Result<Self> {
        let a = grid.anchor_bin();
        let voice = Voice {
            bin: a,
            timbre: *timbre,
            gain: 1.0,
        };
        let single = deposit_voices(grid, &[voice])?;
        let h_ref = harmonicity(&single, hp)?[a];
        let upper = quarter_erb_partner(grid)?;
        let pair = deposit_voices(grid, &[voice, Voice { bin: upper, ..voice }])?;
        let r_ref = roughness_at(&pair, &erb_rates(grid), a);
        Self::new(h_ref, r_ref)
    }

    pub fn new(h_ref: f64, r_ref: f64) -> Result<Self> {
        if !(h_ref > 0.0 && r_ref > 0.0) || !h_ref.is_finite() || !r_ref.is_finite() {
            return Err(Error::Domain(format!(
                "calibration constants must be positive, got H {h_ref}, R {r_ref}"
            )));
        }
        Ok(Self { h_ref, r_ref })
    }

    /// Both divisors scaled by `factor` (headroom for dense scenes).
    pub fn scaled(&self, h_factor: f64, r_factor: f64) -> Result<Self> {
        Self::new(self.h_ref * h_factor, self.r_ref * r_factor)
    }

    #[inline]
    pub fn h01(&self, raw: f64) -> f64 {
        (raw / self.h_ref).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn r01(&self, raw: f64) -> f64 {
        (raw / self.r_ref).clamp(0.0, 1.0)
    }

    /// `C_field` from raw values.
    #[inline]
    pub fn c_field(&self, h_raw: f64, r_raw: f64) -> f64 {
        consonance_core(self.h01(h_raw), self.r01(r_raw), &ConsonanceCoeffs::FIELD)
    }
}

/// Bin nearest to 0.25 ERB above the anchor.
pub fn quarter_erb_partner(grid: &LogFreqGrid) -> Result<usize> {
    let z = erb_rate_unchecked(grid.f_ref()) + PL_PEAK_ERB;
    grid.bin_of_freq(erb_rate_to_hz(z))
        .ok_or_else(|| Error::Domain("grid too narrow for the roughness reference pair".into()))
}

/// The five landscape views over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandscapeFields {
    pub h01: Vec<f64>,
    pub r01: Vec<f64>,
    pub c_field: Vec<f64>,
    pub c_density: Vec<f64>,
    pub c_level01: Vec<f64>,
    /// Bins where the raw value exceeded its calibration divisor.
    pub clipped_h: usize,
    pub clipped_r: usize,
}

impl LandscapeFields {
    pub fn from_raw(h_raw: &[f64], r_raw: &[f64], cal: &Calibration, level: &LevelParams) -> Self {
        let h01: Vec<f64> = h_raw.iter().map(|&h| cal.h01(h)).collect();
        let r01: Vec<f64> = r_raw.iter().map(|&r| cal.r01(r)).collect();
        let c_field: Vec<f64> = h01
            .iter()
            .zip(&r01)
            .map(|(&h, &r)| consonance_core(h, r, &ConsonanceCoeffs::FIELD))
            .collect();
        let c_density = h01
            .iter()
            .zip(&r01)
            .map(|(&h, &r)| consonance_core(h, r, &ConsonanceCoeffs::DENSITY))
            .collect();
        let c_level01 = c_field
            .iter()
            .map(|&c| c_level01(c, level.beta, level.theta))
            .collect();
        Self {
            clipped_h: h_raw.iter().filter(|&&h| h > cal.h_ref).count(),
            clipped_r: r_raw.iter().filter(|&&r| r > cal.r_ref).count(),
            h01,
            r01,
            c_field,
            c_density,
            c_level01,
        }
    }

    pub fn len(&self) -> usize {
        self.c_field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_field.is_empty()
    }
}

/// Full landscape of a spectrum.
pub fn build_fields(
    s: &Spectrum,
    hp: &HarmonicityParams,
    cal: &Calibration,
    level: &LevelParams,
) -> Result<LandscapeFields> {
    let h = harmonicity(s, hp)?;
    let r = roughness(s);
    Ok(LandscapeFields::from_raw(&h, &r, cal, level))
}
