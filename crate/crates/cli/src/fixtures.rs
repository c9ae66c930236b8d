//! Bundled table transcriptions. Setting `POLMOD_FIXTURES` to a directory
//! makes the loader read the same file names from there instead.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

pub const ENV_VAR: &str = "POLMOD_FIXTURES";

const BUNDLED: &[(&str, &str)] = &[
    ("fast_examples.json", include_str!("../fixtures/fast_examples.json")),
    ("frobenius_deg4.json", include_str!("../fixtures/frobenius_deg4.json")),
    ("frobenius_deg5.json", include_str!("../fixtures/frobenius_deg5.json")),
    ("homogeneous.json", include_str!("../fixtures/homogeneous.json")),
    ("hilbert_deg4.json", include_str!("../fixtures/hilbert_deg4.json")),
    ("hilbert_deg5.json", include_str!("../fixtures/hilbert_deg5.json")),
    ("exceptions.json", include_str!("../fixtures/exceptions.json")),
    ("experiments.json", include_str!("../fixtures/experiments.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("no fixture file named {0}")]
    Unknown(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {file}: {source}")]
    Json { file: String, source: serde_json::Error },
}

#[derive(Clone, Debug, Deserialize)]
pub struct Check {
    pub n: usize,
    pub ell: usize,
}

/// One table row: generators plus an expected Frobenius series or Hilbert series.
#[derive(Clone, Debug, Deserialize)]
pub struct FixtureRecord {
    pub id: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub series: Option<String>,
    /// Coefficients keyed by comma-separated partition, values are formulas in `n`.
    #[serde(default)]
    pub hilbert: Option<BTreeMap<String, String>>,
    /// `"s"` or `"h"` for the `hilbert` map; Schur if absent.
    #[serde(default)]
    pub basis: Option<String>,
    pub check: Vec<Check>,
    pub source: String,
    /// The value as printed, when it differs from the corrected `series`.
    #[serde(default)]
    pub printed: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
    /// The generator appears in more than one row of its table.
    #[serde(default)]
    pub duplicate: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct FixtureSet {
    pub set: String,
    pub rows: Vec<FixtureRecord>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct EquationRow {
    pub n: usize,
    pub equation: String,
    #[serde(default)]
    pub printed: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PointRow {
    pub n: usize,
    pub abc: [i64; 3],
    pub exception: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExceptionFixtures {
    pub table1: Vec<EquationRow>,
    pub table7: Vec<EquationRow>,
    pub points: Vec<PointRow>,
}

fn read(name: &str) -> Result<String, FixtureError> {
    if let Some(dir) = std::env::var_os(ENV_VAR) {
        let path = PathBuf::from(dir).join(name);
        return std::fs::read_to_string(&path).map_err(|source| FixtureError::Io { path, source });
    }
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| FixtureError::Unknown(name.into()))
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str) -> Result<T, FixtureError> {
    serde_json::from_str(&read(name)?).map_err(|source| FixtureError::Json { file: name.into(), source })
}

pub fn series_set(file: &str) -> Result<FixtureSet, FixtureError> {
    parse(file)
}

pub fn exceptions() -> Result<ExceptionFixtures, FixtureError> {
    parse("exceptions.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        for (name, _) in BUNDLED {
            if *name == "exceptions.json" {
                let e = exceptions().unwrap();
                assert_eq!(e.table1.len(), 5);
                assert_eq!(e.table7.len(), 40);
            } else {
                let s = series_set(name).unwrap();
                assert!(!s.rows.is_empty(), "{name}");
                for r in &s.rows {
                    assert!(!r.source.is_empty() && !r.check.is_empty(), "{}", r.id);
                    assert!(r.series.is_some() || r.hilbert.is_some(), "{}", r.id);
                }
            }
        }
    }
}
