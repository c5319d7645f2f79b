//! On-disk format for sparse coefficient matrices: a `row,col,value` triplet
//! CSV (1-based indices, ordered by column then row) plus a JSON sidecar
//! carrying the dimensions and solve metadata needed to interpret it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Method;
use crate::solver::{SparseCoefficients, SparseEntry};

const HEADER: &str = "row,col,value";
const SIDECAR_SCHEMA: u32 = 1;

/// Metadata stored next to a triplet file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SparseMeta {
    pub schema: u32,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    /// Solver that produced the coefficients, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Neighbourhood size used, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbors: Option<usize>,
}

impl SparseMeta {
    pub fn new(z: &SparseCoefficients, method: Option<Method>, neighbors: Option<usize>) -> Self {
        Self {
            schema: SIDECAR_SCHEMA,
            rows: z.num_samples(),
            cols: z.num_samples(),
            nnz: z.nnz(),
            method,
            neighbors,
        }
    }
}

/// Writes the triplet CSV and its sidecar.
pub fn save_sparse(
    csv_path: impl AsRef<Path>,
    meta_path: impl AsRef<Path>,
    z: &SparseCoefficients,
    meta: &SparseMeta,
) -> Result<()> {
    let csv_path = csv_path.as_ref();
    let mut w = BufWriter::new(File::create(csv_path)?);
    writeln!(w, "{HEADER}")?;
    for (col, entries) in z.columns().iter().enumerate() {
        for e in entries {
            writeln!(w, "{},{},{}", e.row + 1, col + 1, e.value)?;
        }
    }
    w.flush()?;

    let json = serde_json::to_string_pretty(meta)?;
    std::fs::write(meta_path.as_ref(), json)?;
    Ok(())
}

/// Reads a triplet CSV and its sidecar, validating the dimensions and the
/// entry count against the metadata.
pub fn load_sparse(
    csv_path: impl AsRef<Path>,
    meta_path: impl AsRef<Path>,
) -> Result<(SparseCoefficients, SparseMeta)> {
    let meta_path = meta_path.as_ref();
    let meta: SparseMeta = serde_json::from_str(&std::fs::read_to_string(meta_path)?)?;
    if meta.schema != SIDECAR_SCHEMA {
        return Err(Error::Format {
            path: meta_path.display().to_string(),
            reason: format!("unsupported sidecar schema {}, expected {SIDECAR_SCHEMA}", meta.schema),
        });
    }
    if meta.rows != meta.cols {
        return Err(Error::Format {
            path: meta_path.display().to_string(),
            reason: "coefficient matrices are square".into(),
        });
    }

    let csv_path = csv_path.as_ref();
    let reader = BufReader::new(File::open(csv_path)?);
    let n = meta.rows;
    let mut columns: Vec<Vec<SparseEntry>> = vec![Vec::new(); n];
    let mut count = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (lineno == 0 && trimmed == HEADER) {
            continue;
        }
        let mut parts = trimmed.split(',');
        let bad = |what: &str| Error::Format {
            path: csv_path.display().to_string(),
            reason: format!("line {}: {what}", lineno + 1),
        };
        let row: usize = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("missing or invalid row index"))?;
        let col: usize = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("missing or invalid column index"))?;
        let value: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| bad("missing or invalid value"))?;
        if parts.next().is_some() {
            return Err(bad("too many fields"));
        }
        if row == 0 || col == 0 || row > n || col > n {
            return Err(bad(&format!("indices must lie in 1..={n}")));
        }
        columns[col - 1].push(SparseEntry {
            row: row - 1,
            value,
        });
        count += 1;
    }
    if count != meta.nnz {
        return Err(Error::Format {
            path: csv_path.display().to_string(),
            reason: format!("{count} triplets found, sidecar promises {}", meta.nnz),
        });
    }
    for col in columns.iter_mut() {
        col.sort_by_key(|e| e.row);
    }
    let z = SparseCoefficients::from_columns(n, columns).map_err(|e| Error::Format {
        path: csv_path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok((z, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_union, SyntheticSpec};
    use crate::neighbors::knn_select;
    use crate::solver::{solve_all, SolverConfig, Variant};

    #[test]
    fn triplet_round_trip_preserves_everything() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("z.csv");
        let json = dir.path().join("z.meta.json");

        let x = generate_union(&SyntheticSpec::uniform(2, 3, 10, 14, 2)).unwrap().matrix;
        let omega = knn_select(&x, 5).unwrap();
        let (z, _) = solve_all(&x, &omega, &SolverConfig::default(), Variant::Relaxed).unwrap();

        let meta = SparseMeta::new(&z, Some(Method::KsscRelaxed), Some(5));
        save_sparse(&csv, &json, &z, &meta).unwrap();
        let (loaded, loaded_meta) = load_sparse(&csv, &json).unwrap();
        assert_eq!(loaded_meta, meta);
        assert_eq!(loaded.to_dense(), z.to_dense());

        // file is 1-based with a header
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("row,col,value\n"));
        for line in text.lines().skip(1) {
            let row: usize = line.split(',').next().unwrap().parse().unwrap();
            assert!(row >= 1);
        }
    }

    #[test]
    fn nnz_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("z.csv");
        let json = dir.path().join("z.meta.json");
        std::fs::write(&csv, "row,col,value\n1,2,0.5\n").unwrap();
        std::fs::write(
            &json,
            r#"{"schema":1,"rows":3,"cols":3,"nnz":2}"#,
        )
        .unwrap();
        let err = load_sparse(&csv, &json).unwrap_err();
        assert!(err.to_string().contains("promises"));
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("z.csv");
        let json = dir.path().join("z.meta.json");
        std::fs::write(&csv, "row,col,value\n4,1,0.5\n").unwrap();
        std::fs::write(&json, r#"{"schema":1,"rows":3,"cols":3,"nnz":1}"#).unwrap();
        assert!(load_sparse(&csv, &json).is_err());
    }
}
