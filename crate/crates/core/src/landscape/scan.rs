//! Single-anchor landscape scan: how the field around one voice looks to a
//! second voice swept across the band.

use std::io::Write;

use serde::Serialize;

use super::fields::{consonance_core, Calibration, ConsonanceCoeffs};
use super::harmonicity::HarmonicityParams;
use super::response::ResponseTables;
use super::spectrum::VoiceTimbre;
use super::grid_for_band;
use crate::error::Result;
use crate::output::sig6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub cents: f64,
    #[serde(rename = "H01")]
    pub h01: f64,
    #[serde(rename = "R01")]
    pub r01: f64,
    #[serde(rename = "C_field")]
    pub c_field: f64,
    #[serde(rename = "C_density")]
    pub c_density: f64,
}

/// Scans a probe voice over `±probe_range_oct` around an anchor voice.
///
/// Each row is the anchor + probe scene evaluated at the probe bin with the
/// probe's own contribution left out, i.e. what an agent at that pitch sees.
pub fn single_anchor_scan(
    anchor_hz: f64,
    probe_range_oct: f64,
    timbre: &VoiceTimbre,
    hp: &HarmonicityParams,
) -> Result<Vec<ScanRow>> {
    let grid = grid_for_band(anchor_hz, probe_range_oct, timbre, hp)?;
    let band = grid.band(probe_range_oct);
    let tables = ResponseTables::build(&grid, band, timbre, hp)?;
    let cal = Calibration::reference(&grid, timbre, hp)?;
    scan_with_tables(&tables, &cal)
}

pub(crate) fn scan_with_tables(tables: &ResponseTables, cal: &Calibration) -> Result<Vec<ScanRow>> {
    let grid = tables.grid();
    let anchor = grid.anchor_bin();
    Ok(tables
        .band()
        .iter()
        .map(|probe| {
            let h01 = cal.h01(tables.h(anchor, probe));
            let r01 = cal.r01(tables.r(anchor, probe));
            ScanRow {
                cents: grid.cents(probe),
                h01,
                r01,
                c_field: consonance_core(h01, r01, &ConsonanceCoeffs::FIELD),
                c_density: consonance_core(h01, r01, &ConsonanceCoeffs::DENSITY),
            }
        })
        .collect())
}

pub const SCAN_CSV_HEADER: &str = "cents,H01,R01,C_field,C_density";

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> Result<()> {
    writeln!(w, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            sig6(r.cents),
            sig6(r.h01),
            sig6(r.r01),
            sig6(r.c_field),
            sig6(r.c_density)
        )?;
    }
    Ok(())
}
