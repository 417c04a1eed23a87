//! Dataset persistence: a human-readable `meta.json` beside a little-endian
//! binary payload `data.bin`, plus CSV export for plotting.
//!
//! data.bin layout: magic "NHDS", version as u32 LE, N and m as u64 LE, then
//! the arrays t [m], V [N*m], q [N*m], p [N*m] as f64 LE, row-major.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};
use std::path::Path;
use thiserror::Error;

const DATA_MAGIC: [u8; 4] = *b"NHDS";
const DATA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o failed: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("format error: {0}")]
    FormatError(String),
    #[error("size mismatch: expected {expected}, found {found} ({what})")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {array} at index {index}")]
    NonFiniteValue { array: &'static str, index: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Reproducibility sidecar stored as `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub version: u32,
    pub n: usize,
    pub m: usize,
    pub t_final: f64,
    pub length: f64,
    pub v0: f64,
    pub n_grf_range: (usize, usize),
    pub omega: f64,
    pub length_scale_range: (f64, f64),
    pub seed: u64,
    /// "train" or "test".
    pub role: String,
}

/// Dense payload: `t` has length m; `v`, `q`, `p` are N x m row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetArrays {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

fn validate(meta: &DatasetMeta, arrays: &DatasetArrays) -> Result<(), DataError> {
    if meta.version != DATA_VERSION {
        return Err(DataError::InvariantViolation(format!(
            "meta.version = {}, expected {DATA_VERSION}",
            meta.version
        )));
    }
    let checks: [(&'static str, &[f64], usize); 4] = [
        ("t", &arrays.t, meta.m),
        ("V", &arrays.v, meta.n * meta.m),
        ("q", &arrays.q, meta.n * meta.m),
        ("p", &arrays.p, meta.n * meta.m),
    ];
    for (what, data, expected) in checks {
        if data.len() != expected {
            return Err(DataError::SizeMismatch {
                what,
                expected,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(DataError::NonFiniteValue { array: what, index });
        }
    }
    Ok(())
}

/// Write `meta.json` and `data.bin` into the directory at `path`.
pub fn write_dataset(
    path: &Path,
    meta: &DatasetMeta,
    arrays: &DatasetArrays,
) -> Result<(), DataError> {
    validate(meta, arrays)?;
    std::fs::create_dir_all(path)?;
    let json = serde_json::to_string_pretty(meta)
        .map_err(|e| DataError::FormatError(format!("meta serialization: {e}")))?;
    std::fs::write(path.join("meta.json"), json)?;

    let mut w = std::io::BufWriter::new(std::fs::File::create(path.join("data.bin"))?);
    w.write_all(&DATA_MAGIC)?;
    w.write_all(&DATA_VERSION.to_le_bytes())?;
    w.write_all(&(meta.n as u64).to_le_bytes())?;
    w.write_all(&(meta.m as u64).to_le_bytes())?;
    for array in [&arrays.t, &arrays.v, &arrays.q, &arrays.p] {
        for &x in array.iter() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_f64_array(r: &mut impl Read, len: usize, what: &'static str) -> Result<Vec<f64>, DataError> {
    let mut bytes = vec![0u8; len * 8];
    r.read_exact(&mut bytes).map_err(|_| DataError::SizeMismatch {
        what,
        expected: len * 8,
        found: 0,
    })?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Exact inverse of `write_dataset`, with header, size, and finiteness
/// validation.
pub fn read_dataset(path: &Path) -> Result<(DatasetMeta, DatasetArrays), DataError> {
    let json = std::fs::read_to_string(path.join("meta.json"))?;
    let meta: DatasetMeta = serde_json::from_str(&json)
        .map_err(|e| DataError::FormatError(format!("meta.json: {e}")))?;

    let mut r = std::io::BufReader::new(std::fs::File::open(path.join("data.bin"))?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != DATA_MAGIC {
        return Err(DataError::FormatError(format!(
            "bad magic {magic:?}, expected {DATA_MAGIC:?}"
        )));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)?;
    let version = u32::from_le_bytes(buf4);
    if version != DATA_VERSION {
        return Err(DataError::FormatError(format!(
            "unsupported data version {version}, expected {DATA_VERSION}"
        )));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let n = u64::from_le_bytes(buf8) as usize;
    r.read_exact(&mut buf8)?;
    let m = u64::from_le_bytes(buf8) as usize;
    if n != meta.n || m != meta.m {
        return Err(DataError::FormatError(format!(
            "binary header (N = {n}, m = {m}) disagrees with meta (N = {}, m = {})",
            meta.n, meta.m
        )));
    }
    let arrays = DatasetArrays {
        t: read_f64_array(&mut r, m, "t")?,
        v: read_f64_array(&mut r, n * m, "V")?,
        q: read_f64_array(&mut r, n * m, "q")?,
        p: read_f64_array(&mut r, n * m, "p")?,
    };
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(DataError::FormatError("trailing bytes after payload".into()));
    }
    validate(&meta, &arrays)?;
    Ok((meta, arrays))
}

/// Row schemas the CSV exporter knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Potential,
    Trajectory,
    Metrics,
    LossHistory,
}

impl CsvKind {
    fn header(self) -> &'static str {
        match self {
            CsvKind::Potential => "q,V",
            CsvKind::Trajectory => "t,q,p",
            CsvKind::Metrics => "sample_id,l_q,l_p,l_tot,time_s",
            CsvKind::LossHistory => "epoch,train_loss,val_loss,lr",
        }
    }

    fn width(self) -> usize {
        self.header().split(',').count()
    }

    /// Columns that hold integer identifiers rather than measurements.
    fn id_column(self) -> Option<usize> {
        match self {
            CsvKind::Metrics | CsvKind::LossHistory => Some(0),
            _ => None,
        }
    }
}

/// Write rows under a fixed header; floats get 17 significant digits so a
/// parse recovers them exactly.
pub fn export_csv(path: &Path, kind: CsvKind, rows: &[Vec<f64>]) -> Result<(), DataError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{}", kind.header())?;
    for row in rows {
        if row.len() != kind.width() {
            return Err(DataError::SizeMismatch {
                what: "csv row",
                expected: kind.width(),
                found: row.len(),
            });
        }
        let mut line = String::new();
        for (col, &x) in row.iter().enumerate() {
            if col > 0 {
                line.push(',');
            }
            if kind.id_column() == Some(col) {
                line.push_str(&format!("{}", x as u64));
            } else {
                line.push_str(&format!("{x:.16e}"));
            }
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Minimal reader for the exporter's own output (used by tests and the
/// benchmark summaries): header line, then rows of f64.
pub fn import_csv(path: &Path, kind: CsvKind) -> Result<Vec<Vec<f64>>, DataError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = file.lines();
    let header = lines
        .next()
        .ok_or_else(|| DataError::FormatError("empty csv".into()))??;
    if header != kind.header() {
        return Err(DataError::FormatError(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        let row: Result<Vec<f64>, _> = line.split(',').map(|f| f.parse::<f64>()).collect();
        let row = row.map_err(|e| DataError::FormatError(format!("bad field: {e}")))?;
        if row.len() != kind.width() {
            return Err(DataError::SizeMismatch {
                what: "csv row",
                expected: kind.width(),
                found: row.len(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}
