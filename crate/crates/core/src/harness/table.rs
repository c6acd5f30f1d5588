//! Result tables and their on-disk form.
//!
//! Every experiment produces one [`ResultTable`]: a numeric row matrix with
//! a named, unit-carrying column schema, plus the acceptance [`BandCheck`]s
//! evaluated on the run. Tables serialize two ways:
//!
//! * CSV — the plot-ready artifact. A `#`-comment header carries the
//!   experiment name, config hash and per-column unit/origin tags; the body
//!   is plain comma-separated numbers printed with Rust's shortest
//!   round-trip formatting. Nothing run-dependent (wall time) appears here,
//!   so reruns of the same config and seed are byte-identical.
//! * JSON — the same rows losslessly, plus a metadata block with the config
//!   hash, wall time and the band checks. Wall time varies between runs, so
//!   only the CSV is the determinism artifact.
//!
//! Both are written atomically: bytes go to a `.partial` file in the target
//! directory first and are renamed into place afterwards. A crash between
//! the two steps leaves at worst an abandoned `.partial`; the destination
//! path never holds a torn file. [`stage_output`] and
//! [`StagedOutput::commit`] expose the two halves so tests can inject a
//! crash in the gap.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentKind;
use crate::error::{Error, Result};

/// One column of a result table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Physical unit; "1" for dimensionless quantities and "flag" for 0/1
    /// indicator columns.
    pub unit: String,
    /// How the numbers were obtained: "design" for swept inputs, "measured"
    /// for direct observables, "fitted" for regression outputs.
    pub origin: String,
}

impl Column {
    pub fn new(name: &str, unit: &str, origin: &str) -> Column {
        Column { name: name.into(), unit: unit.into(), origin: origin.into() }
    }
}

/// One acceptance check: a measured value and the closed interval it must
/// land in. Non-finite values never pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

/// Evaluate a band check.
pub fn band(name: &str, value: f64, lo: f64, hi: f64) -> BandCheck {
    let pass = value.is_finite() && lo <= value && value <= hi;
    BandCheck { name: name.into(), value, lo, hi, pass }
}

/// Run-level metadata; lives in the JSON mirror only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    /// FNV-1a hash of the canonical config serialization; part of the
    /// output file names.
    pub config_hash: String,
    pub dimension: usize,
    /// Wall-clock time of the experiment body in milliseconds. The one
    /// field that varies between identical runs.
    pub wall_ms: f64,
    pub bands: Vec<BandCheck>,
}

/// Numeric results of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub kind: ExperimentKind,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: TableMetadata,
}

impl ResultTable {
    pub fn new(kind: ExperimentKind, columns: Vec<Column>, metadata: TableMetadata) -> ResultTable {
        ResultTable { kind, columns, rows: Vec::new(), metadata }
    }

    /// Append a row; it must match the column schema and be finite so both
    /// serializations stay lossless.
    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(format!(
                "row of width {} against a schema of {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite value {bad} in a result row")));
        }
        self.rows.push(row);
        Ok(())
    }

    /// True when every acceptance band passed.
    pub fn passed(&self) -> bool {
        self.metadata.bands.iter().all(|b| b.pass)
    }

    /// `<experiment>-<config hash>`, the stem of both output files.
    pub fn file_stem(&self) -> String {
        format!("{}-{}", self.kind.name(), self.metadata.config_hash)
    }

    /// Render the deterministic CSV form.
    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment: {}", self.kind.name());
        let _ = writeln!(out, "# config: {}", self.metadata.config_hash);
        let _ = writeln!(out, "# dimension: {}", self.metadata.dimension);
        for c in &self.columns {
            let _ = writeln!(out, "# column {}: unit {}, origin {}", c.name, c.unit, c.origin);
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out.into_bytes()
    }

    /// Render the JSON mirror (rows, schema and metadata).
    pub fn json_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Write `<dir>/<stem>.csv` and `<dir>/<stem>.json` atomically,
    /// creating the directory if needed. Returns the two paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.file_stem()));
        let json = dir.join(format!("{}.json", self.file_stem()));
        write_atomic(&csv, &self.csv_bytes())?;
        write_atomic(&json, &self.json_bytes()?)?;
        Ok((csv, json))
    }
}

/// A staged-but-uncommitted atomic write. Dropping it without
/// [`StagedOutput::commit`] removes the temporary file and leaves the
/// destination untouched.
#[derive(Debug)]
pub struct StagedOutput {
    temp: Option<PathBuf>,
    dest: PathBuf,
}

/// Write `bytes` to a `.partial` sibling of `dest`. The destination is not
/// touched until [`StagedOutput::commit`] renames the staged file over it.
pub fn stage_output(dest: &Path, bytes: &[u8]) -> Result<StagedOutput> {
    let name = dest
        .file_name()
        .ok_or_else(|| Error::domain(format!("output path {} has no file name", dest.display())))?;
    let mut temp_name = name.to_os_string();
    temp_name.push(".partial");
    let temp = dest.with_file_name(temp_name);
    fs::write(&temp, bytes)?;
    Ok(StagedOutput { temp: Some(temp), dest: dest.to_path_buf() })
}

impl StagedOutput {
    /// Rename the staged file into place. Same-directory renames are atomic
    /// on the platforms we run on, so readers see either the old content or
    /// the new, never a prefix.
    pub fn commit(mut self) -> Result<()> {
        let temp = self.temp.take().expect("commit consumes the staged file exactly once");
        fs::rename(temp, &self.dest)?;
        Ok(())
    }
}

impl Drop for StagedOutput {
    fn drop(&mut self) {
        if let Some(temp) = self.temp.take() {
            let _ = fs::remove_file(temp);
        }
    }
}

/// Stage and commit in one go.
pub fn write_atomic(dest: &Path, bytes: &[u8]) -> Result<()> {
    stage_output(dest, bytes)?.commit()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> ResultTable {
        let mut t = ResultTable::new(
            ExperimentKind::SymbolBounds,
            vec![Column::new("r", "1", "design"), Column::new("ratio", "1", "measured")],
            TableMetadata {
                config_hash: "00aabbccddeeff11".into(),
                dimension: 1,
                wall_ms: 1.5,
                bands: vec![band("envelope", 0.5, 0.4, 1.1)],
            },
        );
        t.push_row(vec![0.001, 1.0]).unwrap();
        t.push_row(vec![10.0, 0.25]).unwrap();
        t
    }

    #[test]
    fn bands_are_closed_intervals_and_reject_nan() {
        assert!(band("x", 0.4, 0.4, 1.1).pass);
        assert!(band("x", 1.1, 0.4, 1.1).pass);
        assert!(!band("x", 1.1000001, 0.4, 1.1).pass);
        assert!(!band("x", f64::NAN, 0.4, 1.1).pass);
        assert!(!band("x", f64::INFINITY, 0.0, f64::MAX).pass);
    }

    #[test]
    fn rows_must_fit_the_schema_and_stay_finite() {
        let mut t = sample_table();
        assert!(t.push_row(vec![1.0]).is_err());
        assert!(t.push_row(vec![1.0, f64::NAN]).is_err());
        assert!(t.push_row(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn csv_layout_is_frozen() {
        let want = "\
# experiment: symbol-bounds
# config: 00aabbccddeeff11
# dimension: 1
# column r: unit 1, origin design
# column ratio: unit 1, origin measured
r,ratio
0.001,1
10,0.25
";
        assert_eq!(String::from_utf8(sample_table().csv_bytes()).unwrap(), want);
    }

    #[test]
    fn json_round_trips_the_table() {
        let t = sample_table();
        let bytes = t.json_bytes().unwrap();
        let back: ResultTable = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn commit_publishes_and_drop_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let dest = dir.path().join("table.csv");
        fs::write(&dest, b"old").unwrap();

        // Crash injected between stage and commit: destination keeps the old
        // bytes, the partial file holds the new ones.
        let staged = stage_output(&dest, b"new").unwrap();
        assert_eq!(fs::read(&dest).unwrap(), b"old");
        assert_eq!(fs::read(dir.path().join("table.csv.partial")).unwrap(), b"new");
        std::mem::forget(staged);
        assert_eq!(fs::read(&dest).unwrap(), b"old");

        // An abandoned stage that is dropped normally tidies its temp file.
        drop(stage_output(&dest, b"tidy").unwrap());
        assert!(!dir.path().join("table.csv.partial").exists());
        assert_eq!(fs::read(&dest).unwrap(), b"old");

        write_atomic(&dest, b"new").unwrap();
        assert_eq!(fs::read(&dest).unwrap(), b"new");
        assert!(!dir.path().join("table.csv.partial").exists());
    }

    #[test]
    fn table_write_emits_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let t = sample_table();
        let (csv, json) = t.write(dir.path()).unwrap();
        assert_eq!(csv.file_name().unwrap(), "symbol-bounds-00aabbccddeeff11.csv");
        assert_eq!(json.file_name().unwrap(), "symbol-bounds-00aabbccddeeff11.json");
        assert_eq!(fs::read(&csv).unwrap(), t.csv_bytes());
        let back: ResultTable = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
