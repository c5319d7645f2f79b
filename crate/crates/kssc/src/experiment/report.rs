//! Serializes experiment output: a JSON document holding the spec echo,
//! per-instance records and per-cell aggregates, plus two flat CSV files
//! (one row per record; one row per cell × method) ready for plotting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentResult, RunStatus};

/// Files produced by [`emit_report`].
#[derive(Clone, Debug)]
pub struct ReportPaths {
    pub result_json: PathBuf,
    pub records_csv: PathBuf,
    pub aggregates_csv: PathBuf,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn status_str(s: RunStatus) -> &'static str {
    match s {
        RunStatus::Ok => "ok",
        RunStatus::SkippedMemory => "skipped_memory",
        RunStatus::Failed => "failed",
    }
}

/// Renders the per-instance CSV (one row per cell × instance × method).
pub fn records_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "cell,instance,method,num_subspaces,subspace_dim,points_per_subspace,ambient_dim,\
         intersection,noise_psnr_db,k,seed,status,sce,knn_seconds,solve_seconds,\
         segment_seconds,mean_iterations,converged_fraction\n",
    );
    for r in &result.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.instance,
            r.method.name(),
            r.params.num_subspaces,
            r.params.subspace_dim,
            r.params.points_per_subspace,
            r.params.ambient_dim,
            r.params.intersection,
            opt(r.params.noise_psnr_db),
            opt_usize(r.k),
            r.seed,
            status_str(r.status),
            opt(r.sce),
            r.knn_seconds,
            r.solve_seconds,
            r.segment_seconds,
            r.mean_iterations,
            r.converged_fraction,
        );
    }
    out
}

/// Renders the per-cell summary CSV (one row per cell × method).
pub fn aggregates_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "cell,method,num_subspaces,subspace_dim,points_per_subspace,ambient_dim,intersection,\
         noise_psnr_db,instances,completed,skipped,failed,mean_sce,median_sce,min_sce,max_sce,\
         mean_knn_seconds,mean_solve_seconds,mean_segment_seconds,mean_iterations,\
         converged_fraction\n",
    );
    for a in &result.aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.cell,
            a.method.name(),
            a.params.num_subspaces,
            a.params.subspace_dim,
            a.params.points_per_subspace,
            a.params.ambient_dim,
            a.params.intersection,
            opt(a.params.noise_psnr_db),
            a.instances,
            a.completed,
            a.skipped,
            a.failed,
            opt(a.mean_sce),
            opt(a.median_sce),
            opt(a.min_sce),
            opt(a.max_sce),
            opt(a.mean_knn_seconds),
            opt(a.mean_solve_seconds),
            opt(a.mean_segment_seconds),
            opt(a.mean_iterations),
            opt(a.converged_fraction),
        );
    }
    out
}

/// Writes `result.json`, `records.csv` and `aggregates.csv` into `dir`,
/// re-deriving the aggregates from the records first as a consistency check.
pub fn emit_report(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<ReportPaths> {
    result.verify_consistency()?;
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let paths = ReportPaths {
        result_json: dir.join("result.json"),
        records_csv: dir.join("records.csv"),
        aggregates_csv: dir.join("aggregates.csv"),
    };
    std::fs::write(&paths.result_json, serde_json::to_string_pretty(result)?)?;
    std::fs::write(&paths.records_csv, records_csv(result))?;
    std::fs::write(&paths.aggregates_csv, aggregates_csv(result))?;
    Ok(paths)
}

/// Reads a `result.json` back and re-verifies its aggregates.
pub fn load_result(path: impl AsRef<Path>) -> Result<ExperimentResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let result: ExperimentResult = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    result.verify_consistency()?;
    Ok(result)
}
