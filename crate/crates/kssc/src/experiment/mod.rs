//! Declarative experiment harness: a JSON spec describes a grid of synthetic
//! problems, the methods to run, and a seeding policy; the runner executes
//! every (cell, instance, method) combination and aggregates clustering error
//! and stage timings per cell.
//!
//! Each instance seed is a stable hash of (base seed, cell index, instance
//! index), so any cell can be reproduced in isolation and instances can run
//! in parallel without affecting each other's draws. All methods of one
//! instance share the same generated data.

pub mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    self, add_noise, generate_from_library, generate_union, CoefficientLaw, DataMatrix,
    LabelVector, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::metrics::{sce, Method};
use crate::neighbors::knn_select;
use crate::solver::{solve_all, ssc_exact, ssc_relaxed, SolverConfig, Variant};
use crate::spectral::{build_affinity, build_affinity_dense, ncut_segment};

const EXPERIMENT_SCHEMA: u32 = 1;

/// Grid axes; the experiment runs the full cross product.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridAxes {
    /// Number of subspaces per instance.
    pub num_subspaces: Vec<usize>,
    /// Subspace dimension (basis columns per subspace in library mode).
    pub subspace_dims: Vec<usize>,
    /// Points sampled per subspace.
    pub points_per_subspace: Vec<usize>,
    /// Ambient dimension.
    pub ambient_dims: Vec<usize>,
    /// Shared basis directions between two subspaces; 0 disables.
    #[serde(default = "default_intersections")]
    pub intersections: Vec<usize>,
    /// Noise levels as target PSNR in dB; `null` means noise-free.
    #[serde(default = "default_noise_levels")]
    pub noise_psnr_db: Vec<Option<f64>>,
}

fn default_intersections() -> Vec<usize> {
    vec![0]
}

fn default_noise_levels() -> Vec<Option<f64>> {
    vec![None]
}

impl GridAxes {
    pub fn num_cells(&self) -> usize {
        self.num_subspaces.len()
            * self.subspace_dims.len()
            * self.points_per_subspace.len()
            * self.ambient_dims.len()
            * self.intersections.len()
            * self.noise_psnr_db.len()
    }

    /// Cell parameter tuples in a fixed nesting order (subspaces, dims,
    /// points, ambient, intersection, noise; rightmost fastest).
    pub fn cells(&self) -> Vec<CellParams> {
        let mut out = Vec::with_capacity(self.num_cells());
        for &p in &self.num_subspaces {
            for &d in &self.subspace_dims {
                for &n_i in &self.points_per_subspace {
                    for &big_d in &self.ambient_dims {
                        for &t in &self.intersections {
                            for &noise in &self.noise_psnr_db {
                                out.push(CellParams {
                                    num_subspaces: p,
                                    subspace_dim: d,
                                    points_per_subspace: n_i,
                                    ambient_dim: big_d,
                                    intersection: t,
                                    noise_psnr_db: noise,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Parameters of one grid cell.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellParams {
    pub num_subspaces: usize,
    pub subspace_dim: usize,
    pub points_per_subspace: usize,
    pub ambient_dim: usize,
    pub intersection: usize,
    pub noise_psnr_db: Option<f64>,
}

impl CellParams {
    pub fn total_points(&self) -> usize {
        self.num_subspaces * self.points_per_subspace
    }
}

/// Neighbourhood-size policy for the kNN-filtered methods.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum KRule {
    /// Fixed k for every cell.
    Fixed { k: usize },
    /// `k = min(points_per_subspace / 2, 1.5 × ambient_dim)`, rounded down.
    Adaptive,
}

impl KRule {
    /// Resolves the rule for a cell and clamps into `[1, N−1]`.
    pub fn resolve(&self, cell: &CellParams) -> usize {
        let raw = match self {
            KRule::Fixed { k } => *k,
            KRule::Adaptive => {
                let half = cell.points_per_subspace as f64 / 2.0;
                let ambient = 1.5 * cell.ambient_dim as f64;
                half.min(ambient).floor() as usize
            }
        };
        raw.clamp(1, cell.total_points().saturating_sub(1).max(1))
    }
}

/// Where instance data comes from.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Fresh random orthonormal bases per instance.
    Synthetic,
    /// Subspace bases are columns sampled from a fixed library matrix. With a
    /// `path` the library is loaded from disk; without one, a random
    /// orthonormal library of `columns` directions is built once per run.
    Library {
        #[serde(default)]
        path: Option<String>,
        #[serde(default = "default_library_columns")]
        columns: usize,
    },
}

fn default_library_columns() -> usize {
    120
}

impl Default for Generator {
    fn default() -> Self {
        Generator::Synthetic
    }
}

/// Full experiment description; serialized as JSON with a schema version.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentSpec {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub generator: Generator,
    pub grid: GridAxes,
    pub instances_per_cell: usize,
    pub methods: Vec<Method>,
    pub k_rule: KRule,
    #[serde(default)]
    pub coefficient_law: CoefficientLaw,
    #[serde(default)]
    pub solver: SolverConfig,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schema != EXPERIMENT_SCHEMA {
            return Err(Error::InvalidSpec(format!(
                "unsupported experiment schema {}, expected {EXPERIMENT_SCHEMA}",
                self.schema
            )));
        }
        if self.instances_per_cell == 0 {
            return Err(Error::InvalidSpec("instances_per_cell must be ≥ 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidSpec("no methods requested".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidSpec(format!("method {m} listed twice")));
            }
        }
        if let KRule::Fixed { k } = self.k_rule {
            if k == 0 {
                return Err(Error::InvalidSpec("fixed k must be ≥ 1".into()));
            }
        }
        if self.grid.num_cells() == 0 {
            return Err(Error::InvalidSpec("grid has an empty axis".into()));
        }
        self.solver.validate()?;

        match &self.generator {
            Generator::Synthetic => {
                // Every cell must be a generable synthetic spec.
                for cell in self.grid.cells() {
                    synthetic_spec_for(&cell, self.coefficient_law, 0).validate()?;
                }
            }
            Generator::Library { columns, path } => {
                if self.grid.intersections != vec![0] {
                    return Err(Error::InvalidSpec(
                        "library generator does not support basis intersections".into(),
                    ));
                }
                if self.grid.ambient_dims.len() != 1 {
                    return Err(Error::InvalidSpec(
                        "library generator needs a single ambient dimension".into(),
                    ));
                }
                if path.is_none() && *columns == 0 {
                    return Err(Error::InvalidSpec(
                        "random library needs at least one column".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn synthetic_spec_for(cell: &CellParams, law: CoefficientLaw, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        num_subspaces: cell.num_subspaces,
        subspace_dims: vec![cell.subspace_dim; cell.num_subspaces],
        points_per_subspace: vec![cell.points_per_subspace; cell.num_subspaces],
        ambient_dim: cell.ambient_dim,
        coefficient_law: law,
        shared_basis_count: cell.intersection,
        noise_psnr_db: cell.noise_psnr_db,
        seed,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-instance seed: a hash chain over (base, cell, instance).
pub fn instance_seed(base: u64, cell: usize, instance: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ cell as u64) ^ instance as u64)
}

/// How one (cell, instance, method) run ended.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Completed; `sce` and timings are present.
    Ok,
    /// Dense method refused the cell because it would exceed the resident
    /// memory budget.
    SkippedMemory,
    /// Any other error; see `message`.
    Failed,
}

/// One (cell, instance, method) outcome.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceRecord {
    pub cell: usize,
    pub instance: usize,
    pub method: Method,
    #[serde(flatten)]
    pub params: CellParams,
    /// Neighbourhood size used; absent for the dense methods.
    pub k: Option<usize>,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub sce: Option<f64>,
    pub knn_seconds: f64,
    /// Coefficient-stage wall time (the self-expression solve only).
    pub solve_seconds: f64,
    /// Affinity construction plus spectral segmentation.
    pub segment_seconds: f64,
    pub mean_iterations: f64,
    pub converged_fraction: f64,
}

/// Per-(cell, method) summary over completed instances.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellAggregate {
    pub cell: usize,
    pub method: Method,
    #[serde(flatten)]
    pub params: CellParams,
    pub instances: usize,
    pub completed: usize,
    pub skipped: usize,
    pub failed: usize,
    pub mean_sce: Option<f64>,
    pub median_sce: Option<f64>,
    pub min_sce: Option<f64>,
    pub max_sce: Option<f64>,
    pub mean_knn_seconds: Option<f64>,
    pub mean_solve_seconds: Option<f64>,
    pub mean_segment_seconds: Option<f64>,
    pub mean_iterations: Option<f64>,
    pub converged_fraction: Option<f64>,
}

/// Everything an experiment produces: the spec echoed back, every instance
/// record, and per-cell aggregates recomputable from the records.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub records: Vec<InstanceRecord>,
    pub aggregates: Vec<CellAggregate>,
}

impl ExperimentResult {
    /// Recomputes the aggregates from the records and compares; the stored
    /// summaries must be reproducible from the raw data.
    pub fn verify_consistency(&self) -> Result<()> {
        let fresh = aggregate(&self.spec, &self.records);
        if fresh != self.aggregates {
            return Err(Error::InvalidSpec(
                "stored aggregates disagree with the per-instance records".into(),
            ));
        }
        Ok(())
    }

    pub fn aggregate_for(&self, cell: usize, method: Method) -> Option<&CellAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.cell == cell && a.method == method)
    }
}

/// Runs the full grid. Instances execute in parallel; each is deterministic
/// given the spec's seed. Per-run failures are recorded and the run
/// continues; only spec-level validation aborts.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;

    let library = match &spec.generator {
        Generator::Synthetic => None,
        Generator::Library { path, columns } => Some(match path {
            Some(p) => {
                let lib = dataset::io::load_matrix_auto(p)?;
                let want = spec.grid.ambient_dims[0];
                if lib.ambient_dim() != want {
                    return Err(Error::InvalidSpec(format!(
                        "library has ambient dimension {}, grid expects {want}",
                        lib.ambient_dim()
                    )));
                }
                lib
            }
            None => dataset::random_orthonormal_library(
                spec.grid.ambient_dims[0],
                *columns,
                splitmix64(spec.seed ^ 0x11b),
            )?,
        }),
    };

    let cells = spec.grid.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.instances_per_cell).map(move |i| (c, i)))
        .collect();

    let nested: Vec<Vec<InstanceRecord>> = jobs
        .par_iter()
        .map(|&(cell_idx, inst_idx)| {
            run_instance(spec, library.as_ref(), &cells[cell_idx], cell_idx, inst_idx)
        })
        .collect();

    let records: Vec<InstanceRecord> = nested.into_iter().flatten().collect();
    let aggregates = aggregate(spec, &records);
    Ok(ExperimentResult {
        spec: spec.clone(),
        records,
        aggregates,
    })
}

fn run_instance(
    spec: &ExperimentSpec,
    library: Option<&DataMatrix>,
    cell: &CellParams,
    cell_idx: usize,
    inst_idx: usize,
) -> Vec<InstanceRecord> {
    let seed = instance_seed(spec.seed, cell_idx, inst_idx);
    let blank = |method: Method, status: RunStatus, message: String| InstanceRecord {
        cell: cell_idx,
        instance: inst_idx,
        method,
        params: *cell,
        k: method.is_kssc().then(|| spec.k_rule.resolve(cell)),
        seed,
        status,
        message: Some(message),
        sce: None,
        knn_seconds: 0.0,
        solve_seconds: 0.0,
        segment_seconds: 0.0,
        mean_iterations: 0.0,
        converged_fraction: 0.0,
    };

    // Generate once; all methods see the same data.
    let generated: Result<(DataMatrix, LabelVector)> = match library {
        None => generate_union(&synthetic_spec_for(cell, spec.coefficient_law, seed))
            .map(|g| (g.matrix, g.labels)),
        Some(lib) => generate_from_library(
            lib,
            cell.num_subspaces,
            cell.subspace_dim,
            cell.points_per_subspace,
            spec.coefficient_law,
            seed,
        )
        .and_then(|u| match cell.noise_psnr_db {
            Some(psnr) => {
                let noisy = add_noise(&u.matrix, psnr, splitmix64(seed ^ 0x4015e))?;
                Ok((noisy, u.labels))
            }
            None => Ok((u.matrix, u.labels)),
        }),
    };
    let (x, truth) = match generated {
        Ok(pair) => pair,
        Err(e) => {
            return spec
                .methods
                .iter()
                .map(|&m| blank(m, RunStatus::Failed, format!("generation failed: {e}")))
                .collect();
        }
    };

    spec.methods
        .iter()
        .map(|&method| match run_method(spec, cell, &x, &truth, method, seed) {
            Ok(mut rec) => {
                rec.cell = cell_idx;
                rec.instance = inst_idx;
                rec.seed = seed;
                rec
            }
            Err(Error::MemoryBudget { required, budget }) => blank(
                method,
                RunStatus::SkippedMemory,
                format!("needs {required} bytes, budget {budget}"),
            ),
            Err(e) => blank(method, RunStatus::Failed, e.to_string()),
        })
        .collect()
}

fn run_method(
    spec: &ExperimentSpec,
    cell: &CellParams,
    x: &DataMatrix,
    truth: &LabelVector,
    method: Method,
    seed: u64,
) -> Result<InstanceRecord> {
    let p = cell.num_subspaces;
    let mut knn_seconds = 0.0;
    let solve_seconds;
    let mean_iterations;
    let converged_fraction;
    let mut k_used = None;
    let w: crate::spectral::AffinityGraph;

    if method.is_kssc() {
        let k = spec.k_rule.resolve(cell);
        let t0 = Instant::now();
        let omega = knn_select(x, k)?;
        knn_seconds = t0.elapsed().as_secs_f64();
        k_used = Some(omega.k());
        let variant = if method.is_exact() {
            Variant::Exact
        } else {
            Variant::Relaxed
        };
        let t1 = Instant::now();
        let (z, report) = solve_all(x, &omega, &spec.solver, variant)?;
        solve_seconds = t1.elapsed().as_secs_f64();
        mean_iterations = report.mean_iterations;
        converged_fraction = if report.columns.is_empty() {
            0.0
        } else {
            report.converged_columns as f64 / report.columns.len() as f64
        };
        w = build_affinity(&z);
    } else {
        let t1 = Instant::now();
        let (z, report) = if method.is_exact() {
            ssc_exact(x, &spec.solver)?
        } else {
            ssc_relaxed(x, &spec.solver)?
        };
        solve_seconds = t1.elapsed().as_secs_f64();
        mean_iterations = report.iterations as f64;
        converged_fraction = if report.converged { 1.0 } else { 0.0 };
        w = build_affinity_dense(&z);
    }

    let t2 = Instant::now();
    let labels = if p >= 2 {
        ncut_segment(&w, p, seed)?.labels
    } else {
        // Single subspace: segmentation is trivial.
        LabelVector::new(vec![1; x.num_samples()])?
    };
    let segment_seconds = t2.elapsed().as_secs_f64();
    let error = sce(&labels, truth)?;

    Ok(InstanceRecord {
        cell: 0,
        instance: 0,
        method,
        params: *cell,
        k: k_used,
        seed,
        status: RunStatus::Ok,
        message: None,
        sce: Some(error),
        knn_seconds,
        solve_seconds,
        segment_seconds,
        mean_iterations,
        converged_fraction,
    })
}

/// Groups records by (cell, method) in spec order and summarizes.
pub fn aggregate(spec: &ExperimentSpec, records: &[InstanceRecord]) -> Vec<CellAggregate> {
    let cells = spec.grid.cells();
    let mut out = Vec::with_capacity(cells.len() * spec.methods.len());
    for (cell_idx, cell) in cells.iter().enumerate() {
        for &method in &spec.methods {
            let group: Vec<&InstanceRecord> = records
                .iter()
                .filter(|r| r.cell == cell_idx && r.method == method)
                .collect();
            let completed: Vec<&&InstanceRecord> = group
                .iter()
                .filter(|r| r.status == RunStatus::Ok)
                .collect();
            let skipped = group
                .iter()
                .filter(|r| r.status == RunStatus::SkippedMemory)
                .count();
            let failed = group
                .iter()
                .filter(|r| r.status == RunStatus::Failed)
                .count();

            let mut sces: Vec<f64> = completed.iter().filter_map(|r| r.sce).collect();
            sces.sort_by(|a, b| a.partial_cmp(b).expect("SCE is finite"));
            let mean = |f: &dyn Fn(&InstanceRecord) -> f64| -> Option<f64> {
                if completed.is_empty() {
                    None
                } else {
                    Some(completed.iter().map(|r| f(r)).sum::<f64>() / completed.len() as f64)
                }
            };

            out.push(CellAggregate {
                cell: cell_idx,
                method,
                params: *cell,
                instances: group.len(),
                completed: completed.len(),
                skipped,
                failed,
                mean_sce: if sces.is_empty() {
                    None
                } else {
                    Some(sces.iter().sum::<f64>() / sces.len() as f64)
                },
                median_sce: median(&sces),
                min_sce: sces.first().copied(),
                max_sce: sces.last().copied(),
                mean_knn_seconds: mean(&|r| r.knn_seconds),
                mean_solve_seconds: mean(&|r| r.solve_seconds),
                mean_segment_seconds: mean(&|r| r.segment_seconds),
                mean_iterations: mean(&|r| r.mean_iterations),
                converged_fraction: mean(&|r| r.converged_fraction),
            });
        }
    }
    out
}

fn median(sorted: &[f64]) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    if n % 2 == 1 {
        Some(sorted[n / 2])
    } else {
        Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2]))
    }
}
