//! State files (JSON) and counts files (CSV).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use bellfilter_core::state::validate_density;
use bellfilter_core::tomography::{
    tomography_projectors, MeasurementRecord, Polarization, SETTINGS,
};
use bellfilter_core::{DensityMatrix, Mat2, Mat4, C64};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest accepted deviation from Hermiticity, unit trace and positivity.
pub const STATE_TOL: f64 = 1e-9;

/// `[re, im]`
pub type Pair = [f64; 2];
/// Row-major 4x4 matrix of `[re, im]` pairs in `HH, HV, VH, VV` order.
pub type MatrixJson = [[Pair; 4]; 4];
pub type Matrix2Json = [[Pair; 2]; 2];

pub fn matrix_to_json(m: &Mat4) -> MatrixJson {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

pub fn matrix2_to_json(m: &Mat2) -> Matrix2Json {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

pub fn matrix_from_json(m: &MatrixJson) -> Mat4 {
    Mat4::from_fn(|i, j| C64::new(m[i][j][0], m[i][j][1]))
}

pub fn state_to_string(rho: &DensityMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&matrix_to_json(rho.matrix()))?)
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let m: MatrixJson = serde_json::from_str(text)?;
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Format("state entries must be finite".into()));
    }
    Ok(validate_density(&matrix_from_json(&m), STATE_TOL)?)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_state(&text)
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let text = state_to_string(rho)? + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRow {
    setting_index: usize,
    alice_basis: String,
    bob_basis: String,
    count: u64,
}

pub fn write_counts<W: Write>(out: W, rec: &MeasurementRecord) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, (a, b)) in rec.settings.entries().iter().enumerate() {
        w.serialize(CountRow {
            setting_index: i,
            alice_basis: a.label().to_string(),
            bob_basis: b.label().to_string(),
            count: rec.counts[i],
        })?;
    }
    w.flush().map_err(|e| Error::io("<counts>", e))?;
    Ok(())
}

/// Reads the 16 counts; rows may come in any order but each setting must
/// appear exactly once with its documented basis labels.
pub fn read_counts<R: Read>(input: R) -> Result<[u64; SETTINGS]> {
    let expected = tomography_projectors();
    let mut counts: [Option<u64>; SETTINGS] = [None; SETTINGS];
    let mut reader = csv::Reader::from_reader(input);
    for row in reader.deserialize() {
        let row: CountRow = row?;
        let i = row.setting_index;
        if i >= SETTINGS {
            return Err(Error::Format(format!(
                "setting_index {i} out of range 0..16"
            )));
        }
        let labels = (
            Polarization::from_label(row.alice_basis.trim()),
            Polarization::from_label(row.bob_basis.trim()),
        );
        let (a, b) = expected.entries()[i];
        if labels != (Some(a), Some(b)) {
            return Err(Error::Format(format!(
                "setting {i} must be {}{}, found {}{}",
                a.label(),
                b.label(),
                row.alice_basis,
                row.bob_basis
            )));
        }
        if counts[i].replace(row.count).is_some() {
            return Err(Error::Format(format!("setting {i} listed twice")));
        }
    }
    let mut out = [0u64; SETTINGS];
    for (i, c) in counts.iter().enumerate() {
        out[i] = c.ok_or_else(|| Error::Format(format!("setting {i} missing")))?;
    }
    Ok(out)
}

pub fn read_counts_file(path: &Path) -> Result<[u64; SETTINGS]> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_counts(file)
}
