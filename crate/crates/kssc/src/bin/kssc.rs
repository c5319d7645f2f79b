//! Command-line front end: generate synthetic data, cluster a matrix, score
//! labelings, evaluate the cost model, and run experiment grids.
//!
//! Exit codes: 0 on success, 2 on validation/input errors, 3 when the solver
//! fails to converge beyond its tolerated failure share.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use kssc::dataset::{self, generate_union, LabelVector, SyntheticSpec};
use kssc::error::Error;
use kssc::experiment::{self, report};
use kssc::metrics::{cost_model, sce, CostModelInput, Method};
use kssc::neighbors::knn_select;
use kssc::solver::{
    export, solve_all, ssc_exact, ssc_relaxed, LambdaRule, SolverConfig, Variant,
};
use kssc::spectral::{
    build_affinity, build_affinity_dense, estimate_p, ncut_segment, AffinityGraph, GapMethod,
};

const SPEC_SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "kssc",
    version,
    about = "Subspace clustering via nearest-neighbour-filtered sparse self-expression"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a synthetic union of subspaces and write matrix + labels.
    Generate(GenerateArgs),
    /// Cluster the columns of a matrix and write labels (and optionally the
    /// coefficient matrix and spectral embedding).
    Cluster(ClusterArgs),
    /// Score predicted labels against ground truth.
    Evaluate(EvaluateArgs),
    /// Evaluate the per-iteration FLOP / resident-float cost model.
    Flops(FlopsArgs),
    /// Run a declarative experiment grid and write result files.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Generation spec: JSON with a `schema` field plus the synthetic-union
    /// parameters.
    #[arg(long)]
    spec: PathBuf,
    /// Output matrix (`.csv` for text, anything else for the binary format).
    #[arg(long)]
    out_matrix: PathBuf,
    /// Output labels (one 1-based id per line).
    #[arg(long)]
    out_labels: PathBuf,
    /// Also write the noise-free matrix (equals the output when no noise was
    /// requested).
    #[arg(long)]
    out_clean: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Input matrix, one sample per column.
    #[arg(long)]
    matrix: PathBuf,
    /// Neighbourhood size; enables the kNN-filtered solver. Omit to run the
    /// dense solver over all columns.
    #[arg(long)]
    k: Option<usize>,
    /// Fixed sparsity weight λ for every column.
    #[arg(long, conflicts_with = "lambda_scale")]
    lambda: Option<f64>,
    /// Per-column λ as a fraction of the largest dictionary correlation.
    #[arg(long)]
    lambda_scale: Option<f64>,
    /// Objective form: `relaxed` (penalized fit) or `exact` (constrained).
    #[arg(long, default_value = "relaxed")]
    variant: String,
    /// Number of clusters.
    #[arg(long, required_unless_present = "estimate_p", conflicts_with = "estimate_p")]
    p: Option<usize>,
    /// Estimate the cluster count from the affinity spectrum
    /// (`eigen_gap` or `svd_gap`).
    #[arg(long, value_name = "METHOD", num_args = 0..=1, default_missing_value = "eigen_gap")]
    estimate_p: Option<String>,
    /// Seed for segmentation (eigensolver restarts and k-means).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver configuration JSON; unset fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output labels (one 1-based id per line).
    #[arg(long)]
    out_labels: PathBuf,
    /// Export coefficients as triplet CSV; a `<path>.meta.json` sidecar is
    /// written alongside.
    #[arg(long)]
    out_coeffs: Option<PathBuf>,
    /// Export the row-normalized spectral embedding as a binary matrix.
    #[arg(long)]
    out_embedding: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predicted labels (one 1-based id per line).
    #[arg(long)]
    labels: PathBuf,
    /// Ground-truth labels.
    #[arg(long)]
    truth: PathBuf,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlopsArgs {
    /// One of kssc_relaxed, kssc_exact, ssc_relaxed, ssc_exact.
    #[arg(long)]
    method: String,
    #[arg(long)]
    num_samples: usize,
    #[arg(long)]
    ambient_dim: usize,
    /// Neighbourhood size; required for the kssc methods.
    #[arg(long)]
    neighbors: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment spec JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Directory for result.json, records.csv and aggregates.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

/// On-disk generation document: version wrapper around the library spec.
#[derive(Serialize, Deserialize)]
struct GenerateDoc {
    schema: u32,
    #[serde(flatten)]
    spec: SyntheticSpec,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverFailures { .. } | Error::Divergence(_) | Error::Eigen(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> kssc::Result<()> {
    match cli.cmd {
        Cmd::Generate(args) => generate(args),
        Cmd::Cluster(args) => cluster(args),
        Cmd::Evaluate(args) => evaluate(args),
        Cmd::Flops(args) => flops(args),
        Cmd::Experiment(args) => experiment(args),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> kssc::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn generate(args: GenerateArgs) -> kssc::Result<()> {
    let doc: GenerateDoc = read_json(&args.spec)?;
    if doc.schema != SPEC_SCHEMA {
        return Err(Error::InvalidSpec(format!(
            "unsupported generation schema {}, expected {SPEC_SCHEMA}",
            doc.schema
        )));
    }
    let union = generate_union(&doc.spec)?;
    dataset::io::save_matrix_auto(&args.out_matrix, &union.matrix)?;
    dataset::io::save_labels(&args.out_labels, &union.labels)?;
    if let Some(clean_path) = &args.out_clean {
        let clean = union.clean.as_ref().unwrap_or(&union.matrix);
        dataset::io::save_matrix_auto(clean_path, clean)?;
    }
    println!(
        "{}",
        serde_json::json!({
            "num_samples": union.matrix.num_samples(),
            "ambient_dim": union.matrix.ambient_dim(),
            "num_subspaces": doc.spec.num_subspaces,
            "matrix": args.out_matrix,
            "labels": args.out_labels,
        })
    );
    Ok(())
}

fn cluster(args: ClusterArgs) -> kssc::Result<()> {
    let x = dataset::io::load_matrix_auto(&args.matrix)?;
    let variant = Variant::from_str(&args.variant)?;

    let mut cfg: SolverConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => SolverConfig::default(),
    };
    if let Some(value) = args.lambda {
        cfg.lambda = LambdaRule::Fixed { value };
    } else if let Some(scale) = args.lambda_scale {
        cfg.lambda = LambdaRule::Scaled { scale };
    }

    // Coefficient stage.
    let w: AffinityGraph;
    let method: Method;
    let mut k_used = None;
    let mut converged_columns = None;
    let solver_converged;
    let sparse;
    match args.k {
        Some(k) => {
            let omega = knn_select(&x, k)?;
            let (z, report) = solve_all(&x, &omega, &cfg, variant)?;
            method = match variant {
                Variant::Relaxed => Method::KsscRelaxed,
                Variant::Exact => Method::KsscExact,
            };
            k_used = Some(omega.k());
            converged_columns = Some(report.converged_columns);
            solver_converged = report.converged_columns == report.columns.len();
            w = build_affinity(&z);
            sparse = z;
        }
        None => {
            let (z, report) = match variant {
                Variant::Relaxed => ssc_relaxed(&x, &cfg)?,
                Variant::Exact => ssc_exact(&x, &cfg)?,
            };
            method = match variant {
                Variant::Relaxed => Method::SscRelaxed,
                Variant::Exact => Method::SscExact,
            };
            solver_converged = report.converged;
            w = build_affinity_dense(&z);
            sparse = z.to_sparse()?;
        }
    }
    if !solver_converged {
        eprintln!("warning: solver stopped at the iteration cap before reaching tolerance");
    }

    if let Some(out) = &args.out_coeffs {
        let sidecar = sidecar_path(out);
        let meta = export::SparseMeta::new(&sparse, Some(method), k_used);
        export::save_sparse(out, &sidecar, &sparse, &meta)?;
    }

    // Segmentation stage.
    let (p, estimated) = match args.p {
        Some(p) => (p, false),
        None => {
            let gap: GapMethod = args
                .estimate_p
                .as_deref()
                .unwrap_or("eigen_gap")
                .parse()?;
            (estimate_p(&w, gap)?, true)
        }
    };
    let (labels, warning) = if p >= 2 {
        let seg = ncut_segment(&w, p, args.seed)?;
        if let Some(out) = &args.out_embedding {
            // The embedding has one row per sample; stored matrices keep one
            // column per sample, so transpose before writing.
            let cols = seg.embedding.t().as_standard_layout().to_owned();
            dataset::io::save_matrix(out, &dataset::DataMatrix::new(cols)?)?;
        }
        (seg.labels, seg.warning)
    } else {
        (LabelVector::new(vec![1; x.num_samples()])?, None)
    };
    if let Some(msg) = warning {
        eprintln!("warning: {msg}");
    }
    dataset::io::save_labels(&args.out_labels, &labels)?;

    println!(
        "{}",
        serde_json::json!({
            "num_samples": x.num_samples(),
            "ambient_dim": x.ambient_dim(),
            "method": method.name(),
            "k": k_used,
            "p": p,
            "p_estimated": estimated,
            "clusters_found": labels.distinct().len(),
            "converged_columns": converged_columns,
            "labels": args.out_labels,
        })
    );
    Ok(())
}

fn sidecar_path(csv: &PathBuf) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn evaluate(args: EvaluateArgs) -> kssc::Result<()> {
    let predicted = dataset::io::load_labels(&args.labels)?;
    let truth = dataset::io::load_labels(&args.truth)?;
    let error = sce(&predicted, &truth)?;
    let report = serde_json::json!({
        "sce_percent": error,
        "num_samples": truth.len(),
        "predicted_clusters": predicted.distinct().len(),
        "truth_clusters": truth.distinct().len(),
    });
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(out) = &args.out {
        std::fs::write(out, &text)?;
    }
    println!("{text}");
    Ok(())
}

fn flops(args: FlopsArgs) -> kssc::Result<()> {
    let method = Method::from_str(&args.method)?;
    let input = CostModelInput {
        method,
        num_samples: args.num_samples,
        ambient_dim: args.ambient_dim,
        neighbors: args.neighbors,
    };
    let estimate = cost_model(&input)?;
    println!(
        "{}",
        serde_json::json!({
            "method": method.name(),
            "num_samples": args.num_samples,
            "ambient_dim": args.ambient_dim,
            "neighbors": args.neighbors,
            "flops_per_iteration": estimate.flops_per_iteration,
            "floats_resident": estimate.floats_resident,
            "bytes_resident": estimate.bytes_resident(),
        })
    );
    Ok(())
}

fn experiment(args: ExperimentArgs) -> kssc::Result<()> {
    let spec: experiment::ExperimentSpec = read_json(&args.spec)?;
    let result = experiment::run_experiment(&spec)?;
    let paths = report::emit_report(&result, &args.out_dir)?;
    let failed = result
        .records
        .iter()
        .filter(|r| r.status == experiment::RunStatus::Failed)
        .count();
    let skipped = result
        .records
        .iter()
        .filter(|r| r.status == experiment::RunStatus::SkippedMemory)
        .count();
    println!(
        "{}",
        serde_json::json!({
            "cells": result.spec.grid.num_cells(),
            "records": result.records.len(),
            "failed": failed,
            "skipped_memory": skipped,
            "result_json": paths.result_json,
            "records_csv": paths.records_csv,
            "aggregates_csv": paths.aggregates_csv,
        })
    );
    Ok(())
}
