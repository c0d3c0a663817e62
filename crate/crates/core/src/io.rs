//! CSV and JSON artifacts.
//!
//! Every CSV starts with a `# config_hash=<sha256> seed=<n>` comment, then a
//! header row. Floats are written with 17 significant digits so a value read
//! back is bit-identical to the one written.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hash and seed stamped on every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self { config_hash: config_hash.into(), seed }
    }

    /// Provenance of a run driven by raw input bytes rather than a config.
    pub fn of_bytes(bytes: &[u8], seed: u64) -> Self {
        Self::new(sha256_hex(bytes), seed)
    }

    fn comment(&self) -> String {
        format!("# config_hash={} seed={}", self.config_hash, self.seed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Shortest fixed-width rendering that round-trips an f64.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV with the provenance comment and a header row.
pub fn write_csv(path: &Path, provenance: &Provenance, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(Error::Shape(format!(
            "row {bad} of {} has {} cells, header has {}",
            path.display(),
            rows[bad].len(),
            header.len()
        )));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", provenance.comment())?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `value` as pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("serializing JSON: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// A numeric CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    /// Values of the column called `name`.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Shape(format!("no column '{name}' in header {:?}", self.header)))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parses a numeric CSV, skipping blank lines and `#` comments.
pub fn parse_csv(text: &str, origin: &str) -> Result<CsvTable> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header_line) = lines.next().ok_or_else(|| Error::Shape(format!("{origin}: missing header row")))?;
    let header: Vec<String> = header_line.split(',').map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Shape(format!("{origin}:{lineno}: '{}' is not a number", cell.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(Error::Shape(format!("{origin}:{lineno}: {} cells, header has {}", row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let prov = Provenance::of_bytes(b"cfg", 7);
        let header = vec!["t".to_string(), "value".to_string()];
        let rows = vec![vec![fmt(0.0), fmt(0.25)], vec![fmt(0.5), fmt(-1.0 / 7.0)]];
        write_csv(&path, &prov, &header, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# config_hash="));
        assert!(text.contains("seed=7"));
        let table = read_csv(&path).unwrap();
        assert_eq!(table.header, header);
        assert_eq!(table.column("value").unwrap(), vec![0.25, -1.0 / 7.0]);
        assert!(table.column("x").is_err());
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(parse_csv("t,value\n1,2,3\n", "mem").is_err());
        assert!(parse_csv("t,value\n1,abc\n", "mem").is_err());
        assert!(parse_csv("# only a comment\n", "mem").is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
