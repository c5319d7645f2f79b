//! On-disk formats for sample matrices and label vectors.
//!
//! Binary matrix layout (little-endian throughout):
//!
//! ```text
//! bytes 0..4    magic "KSSC"
//! bytes 4..8    format version (u32), currently 1
//! bytes 8..16   rows (u64)
//! bytes 16..24  cols (u64)
//! bytes 24..    rows*cols f64 values, column-major
//! ```
//!
//! The CSV matrix format is headerless: one line per matrix row, values
//! comma-separated. Labels are one 1-based integer id per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::dataset::{DataMatrix, LabelVector};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"KSSC";
const FORMAT_VERSION: u32 = 1;

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Writes a matrix in the binary format described in the module docs.
pub fn save_matrix(path: impl AsRef<Path>, matrix: &DataMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(matrix.ambient_dim() as u64).to_le_bytes())?;
    w.write_all(&(matrix.num_samples() as u64).to_le_bytes())?;
    let values = matrix.values();
    for c in 0..values.ncols() {
        for r in 0..values.nrows() {
            w.write_all(&values[[r, c]].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix written by [`save_matrix`], validating magic, version and
/// payload size.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let mut r = BufReader::new(File::open(path)?);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| format_err(path, "file too short for header"))?;
    if &magic != MAGIC {
        return Err(format_err(path, "bad magic; not a KSSC matrix file"));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)
        .map_err(|_| format_err(path, "truncated version field"))?;
    let version = u32::from_le_bytes(buf4);
    if version != FORMAT_VERSION {
        return Err(format_err(
            path,
            format!("unsupported format version {version}, expected {FORMAT_VERSION}"),
        ));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)
        .map_err(|_| format_err(path, "truncated row count"))?;
    let rows = u64::from_le_bytes(buf8);
    r.read_exact(&mut buf8)
        .map_err(|_| format_err(path, "truncated column count"))?;
    let cols = u64::from_le_bytes(buf8);

    let total = rows
        .checked_mul(cols)
        .ok_or_else(|| format_err(path, "dimension overflow"))?;
    if rows == 0 || cols == 0 {
        return Err(format_err(path, "matrix dimensions must be positive"));
    }
    let rows = rows as usize;
    let cols = cols as usize;

    let mut values = Array2::<f64>::zeros((rows, cols));
    let mut cell = [0u8; 8];
    for c in 0..cols {
        for row in 0..rows {
            r.read_exact(&mut cell).map_err(|_| {
                format_err(
                    path,
                    format!("payload truncated; expected {total} values"),
                )
            })?;
            values[[row, c]] = f64::from_le_bytes(cell);
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(format_err(path, "trailing bytes after payload"));
    }
    DataMatrix::new(values).map_err(|e| format_err(path, e.to_string()))
}

/// Writes a matrix as headerless CSV, one line per matrix row.
pub fn save_matrix_csv(path: impl AsRef<Path>, matrix: &DataMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    let values = matrix.values();
    for r in 0..values.nrows() {
        let mut line = String::new();
        for c in 0..values.ncols() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format!("{}", values[[r, c]]));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a headerless CSV matrix; every row must have the same width.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                format_err(
                    path,
                    format!("line {}: cannot parse '{}' as a number", lineno + 1, field.trim()),
                )
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format_err(
                    path,
                    format!(
                        "line {}: expected {} fields, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err(path, "no data rows"));
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    let mut values = Array2::<f64>::zeros((nrows, ncols));
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            values[[r, c]] = v;
        }
    }
    DataMatrix::new(values).map_err(|e| format_err(path, e.to_string()))
}

/// Picks the format from the extension: `.csv` is CSV, everything else binary.
pub fn save_matrix_auto(path: impl AsRef<Path>, matrix: &DataMatrix) -> Result<()> {
    if is_csv(path.as_ref()) {
        save_matrix_csv(path, matrix)
    } else {
        save_matrix(path, matrix)
    }
}

/// Picks the format from the extension: `.csv` is CSV, everything else binary.
pub fn load_matrix_auto(path: impl AsRef<Path>) -> Result<DataMatrix> {
    if is_csv(path.as_ref()) {
        load_matrix_csv(path)
    } else {
        load_matrix(path)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false)
}

/// Writes labels one id per line.
pub fn save_labels(path: impl AsRef<Path>, labels: &LabelVector) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    for &l in labels.as_slice() {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads labels written by [`save_labels`]; ids must be positive integers.
pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVector> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut labels = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let id: u32 = trimmed.parse().map_err(|_| {
            format_err(
                path,
                format!("line {}: '{}' is not a positive integer label", lineno + 1, trimmed),
            )
        })?;
        labels.push(id);
    }
    LabelVector::new(labels).map_err(|e| format_err(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_union, SyntheticSpec};

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.kssc");
        let x = generate_union(&SyntheticSpec::uniform(2, 3, 8, 11, 4)).unwrap().matrix;
        save_matrix(&path, &x).unwrap();
        let y = load_matrix(&path).unwrap();
        assert_eq!(x.values(), y.values());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let x = generate_union(&SyntheticSpec::uniform(2, 3, 8, 11, 4)).unwrap().matrix;
        save_matrix_csv(&path, &x).unwrap();
        let y = load_matrix_csv(&path).unwrap();
        assert_eq!(x.values(), y.values());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.kssc");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x00").unwrap();
        let err = load_matrix(&path).unwrap_err();
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v2.kssc");
        let mut f = File::create(&path).unwrap();
        f.write_all(b"KSSC").unwrap();
        f.write_all(&2u32.to_le_bytes()).unwrap();
        f.write_all(&1u64.to_le_bytes()).unwrap();
        f.write_all(&1u64.to_le_bytes()).unwrap();
        f.write_all(&1.0f64.to_le_bytes()).unwrap();
        drop(f);
        let err = load_matrix(&path).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn truncation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.kssc");
        let x = generate_union(&SyntheticSpec::uniform(1, 2, 4, 5, 8)).unwrap().matrix;
        save_matrix(&good, &x).unwrap();
        let bytes = std::fs::read(&good).unwrap();
        let cut = dir.path().join("cut.kssc");
        std::fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
        let err = load_matrix(&cut).unwrap_err();
        assert!(err.to_string().contains("truncated"));
    }

    #[test]
    fn ragged_csv_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ragged.csv");
        std::fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        let err = load_matrix_csv(&path).unwrap_err();
        assert!(err.to_string().contains("expected 2 fields"));
    }

    #[test]
    fn labels_round_trip_and_reject_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        let labels = LabelVector::new(vec![1, 1, 2, 3, 2]).unwrap();
        save_labels(&path, &labels).unwrap();
        assert_eq!(load_labels(&path).unwrap(), labels);

        std::fs::write(&path, "1\n0\n2\n").unwrap();
        assert!(load_labels(&path).is_err());
    }
}
