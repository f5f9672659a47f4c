//! The psychoacoustic terrain: spectra, harmonicity, roughness and the
//! consonance fields derived from them.

pub mod fields;
pub mod harmonicity;
pub mod kernels;
pub mod response;
pub mod roughness;
pub mod scan;
pub mod shuffle;
pub mod spectrum;

pub use fields::{
    build_fields, c_level01, consonance_core, Calibration, ConsonanceCoeffs, LandscapeFields,
    LevelParams,
};
pub use harmonicity::{harmonicity, HarmonicityParams};
pub use kernels::{erb_rate, pl_kernel, PL_PEAK_ERB};
pub use response::ResponseTables;
pub use roughness::{erb_rates, roughness};
pub use scan::{single_anchor_scan, write_scan_csv, ScanRow, SCAN_CSV_HEADER};
pub use shuffle::{shuffle_c_field, BinPermutation};
pub use spectrum::{deposit_voices, Spectrum, Voice, VoicePattern, VoiceTimbre};

use crate::error::{Error, Result};
use crate::grid::LogFreqGrid;

/// Grid for agents living within `±band_oct` of `f_ref`.
///
/// The span covers every partial of a voice at the top of the band and the
/// full reach of the harmonicity template on both sides, so raw fields inside
/// the band do not depend on where the grid is cut.
pub fn grid_for_band(
    f_ref: f64,
    band_oct: f64,
    timbre: &VoiceTimbre,
    hp: &HarmonicityParams,
) -> Result<LogFreqGrid> {
    if !(band_oct > 0.0) {
        return Err(Error::Domain(format!("band must be > 0 octaves, got {band_oct}")));
    }
    let reach = (timbre.n_partials.max(1) as f64)
        .log2()
        .max((hp.order.max(1) as f64).log2());
    round_span(f_ref, band_oct + reach + 0.1)
}

/// Spans are rounded up to half octaves.
pub(crate) fn round_span(f_ref: f64, span: f64) -> Result<LogFreqGrid> {
    LogFreqGrid::new(f_ref, (span * 2.0).ceil() / 2.0, 3.0)
}
