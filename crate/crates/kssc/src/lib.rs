//! Subspace clustering with nearest-neighbour-filtered sparse
//! self-expression.
//!
//! Points drawn from a union of low-dimensional subspaces can be clustered by
//! writing each point as a sparse combination of the other points, turning
//! the coefficient matrix into a similarity graph, and segmenting that graph
//! spectrally. The classical dense formulation solves an ℓ1 program over all
//! `N` candidate columns per point, which costs `O(N²)` memory and per-
//! iteration work; this crate additionally implements the accelerated
//! variant that restricts each point's candidate set to its `k` nearest
//! neighbours in the ambient space, dropping the coefficient stage to
//! `O(kN)` while preserving the solution whenever the neighbourhoods cover
//! the true supports.
//!
//! The pipeline, end to end:
//!
//! 1. [`dataset`] — synthetic unions of subspaces (controlled dimension,
//!    intersection, and noise level), deterministic under a seed, plus binary
//!    and CSV matrix IO.
//! 2. [`neighbors`] — exact brute-force k-nearest-neighbour candidate sets,
//!    neighbourhood quality counters, and the evaluable success-probability
//!    bound for neighbourhood-based support recovery.
//! 3. [`solver`] — per-column proximal-gradient (relaxed penalty form) and
//!    linearized ADMM (exact constrained form) solvers over restricted
//!    supports; dense whole-matrix counterparts with a resident-memory
//!    guard; sparse coefficient storage and triplet-file export.
//! 4. [`spectral`] — similarity graph `W = |Z| + |Z|ᵀ`, normalized-cut
//!    segmentation, and cluster-count estimation from spectral gaps.
//! 5. [`metrics`] — subspace clustering error under optimal label matching,
//!    peak signal-to-noise ratio, and the closed-form per-iteration FLOP /
//!    resident-float cost model of every method.
//! 6. [`experiment`] — a declarative grid runner that reproduces the
//!    synthetic benchmark protocols with per-instance records and per-cell
//!    aggregates.
//!
//! Everything is deterministic given the seeds in the inputs: generation,
//! neighbour selection (distance ties break on index), solver sweeps, and
//! segmentation all produce identical results across runs and thread counts.
//!
//! ```
//! use kssc::dataset::{generate_union, SyntheticSpec};
//! use kssc::metrics::sce;
//! use kssc::neighbors::knn_select;
//! use kssc::solver::{solve_all, SolverConfig, Variant};
//! use kssc::spectral::{build_affinity, ncut_segment};
//!
//! // Three 4-dimensional subspaces in R^30, 20 points each.
//! let spec = SyntheticSpec::uniform(3, 4, 20, 30, 7);
//! let data = generate_union(&spec).unwrap();
//!
//! let omega = knn_select(&data.matrix, 10).unwrap();
//! let (z, _report) = solve_all(&data.matrix, &omega, &SolverConfig::default(), Variant::Relaxed).unwrap();
//! let labels = ncut_segment(&build_affinity(&z), 3, 7).unwrap().labels;
//!
//! let err = sce(&labels, &data.labels).unwrap();
//! assert_eq!(err, 0.0);
//! ```

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod neighbors;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
