//! CSV tables for plotting.
//!
//! Verification rows: `n, delta_upper, epsilon_n, source`.
//! Δ_n scans: `n, delta_lower, delta_upper, lemma_upper, epsilon_n`.
//! All numbers are exact rationals written as strings.

use std::path::Path;

use betaifs_core::synthesis::CoverageRow;
use betaifs_core::{Error, Result};

pub const VERIFY_COLUMNS: [&str; 4] = ["n", "delta_upper", "epsilon_n", "source"];
pub const DELTA_COLUMNS: [&str; 5] = ["n", "delta_lower", "delta_upper", "lemma_upper", "epsilon_n"];

/// One row of a Δ_n scan; absent values are written as empty fields.
#[derive(Clone, Debug, Default)]
pub struct DeltaRow {
    pub n: u32,
    pub delta_lower: String,
    pub delta_upper: String,
    pub lemma_upper: Option<String>,
    pub epsilon_n: Option<String>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::resource(format!("cannot write {}: {e}", path.display()))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(header).map_err(|e| io(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_verify_csv(path: &Path, rows: &[CoverageRow]) -> Result<()> {
    write_rows(
        path,
        &VERIFY_COLUMNS,
        rows.iter().map(|r| {
            [r.n.to_string(), r.delta_upper.to_string(), r.epsilon.to_string(), r.source.as_str().to_string()]
        }),
    )
}

pub fn write_delta_csv(path: &Path, rows: &[DeltaRow]) -> Result<()> {
    write_rows(
        path,
        &DELTA_COLUMNS,
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                r.delta_lower.clone(),
                r.delta_upper.clone(),
                r.lemma_upper.clone().unwrap_or_default(),
                r.epsilon_n.clone().unwrap_or_default(),
            ]
        }),
    )
}
