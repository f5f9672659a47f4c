//! A deterministic artificial-life ecology on a psychoacoustic consonance
//! landscape.
//!
//! Agents are harmonic voices on a log-frequency grid. The terrain they live
//! on is computed from their own spectra: harmonicity rewards simple
//! frequency ratios, roughness penalizes partials beating inside a critical
//! band, and a bilinear consonance core combines the two. On top of that
//! terrain the crate provides pitch adaptation ([`agents`]), metabolism and
//! respawn ([`lifecycle`]), phase entrainment ([`entrainment`]), the metrics
//! and tests used to read the outcomes ([`analysis`]), and seeded experiment
//! runners that tie everything together ([`experiments`]).

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod analysis;
pub mod entrainment;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod landscape;
pub mod lifecycle;
pub mod output;
pub mod scene;

pub use error::{Error, Result};
pub use grid::{BinRange, LogFreqGrid};
