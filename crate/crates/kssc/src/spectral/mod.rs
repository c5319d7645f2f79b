//! Similarity-graph construction and spectral segmentation.
//!
//! The coefficient matrix from the self-expression stage becomes a symmetric
//! weighted graph `W = |Z| + |Z|ᵀ`. Segmentation runs normalized spectral
//! clustering on that graph: eigenvectors of the `p` smallest eigenvalues of
//! the symmetric normalized Laplacian `L = I − D^{−1/2} W D^{−1/2}`, rows
//! normalized to unit length, then seeded k-means. The number of clusters can
//! be estimated from the largest gap in the ordered eigenvalues of `W` itself
//! (or of its singular values).
//!
//! Zero-degree vertices make `D^{−1/2}` undefined, so each isolated vertex is
//! removed from the eigenproblem and assigned its own singleton label after
//! the `p` main clusters, in ascending vertex order.

mod kmeans;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::dataset::LabelVector;
use crate::error::{Error, Result};
use crate::linalg::{lanczos_smallest, symmetric_eigen, symmetric_eigenvalues, SymOp};
use crate::solver::{DenseCoefficients, SparseCoefficients};

/// Largest connected-part size solved by dense eigendecomposition; larger
/// problems use the iterative solver on the sparse graph operator.
const DENSE_EIGEN_LIMIT: usize = 2000;
/// Convergence tolerance for the iterative eigensolver.
const LANCZOS_TOL: f64 = 1e-10;
/// k-means restarts during segmentation.
const KMEANS_RESTARTS: usize = 10;

/// Symmetric nonnegative similarity graph with zero diagonal.
///
/// Stored as an upper-triangle adjacency list: `edges[i]` holds `(j, w)` pairs
/// with `j > i` and `w > 0`, sorted by `j`. Symmetry therefore holds by
/// construction and memory scales with the number of edges, not `N²`.
#[derive(Clone, Debug)]
pub struct AffinityGraph {
    n: usize,
    edges: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl AffinityGraph {
    fn from_upper(n: usize, edges: Vec<Vec<(usize, f64)>>) -> Self {
        let mut degrees = vec![0.0; n];
        for (i, adj) in edges.iter().enumerate() {
            for &(j, w) in adj {
                degrees[i] += w;
                degrees[j] += w;
            }
        }
        Self { n, edges, degrees }
    }

    /// Builds a graph from an explicit undirected edge list. Vertex indices
    /// are 0-based; each unordered pair may appear at most once.
    pub fn from_edges(n: usize, list: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("graph needs at least one vertex".into()));
        }
        let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, w) in list {
            if a >= n || b >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidSpec(format!("self-loop at vertex {a}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "edge ({a}, {b}) has invalid weight {w}"
                )));
            }
            if w > 0.0 {
                edges[a.min(b)].push((a.max(b), w));
            }
        }
        for (i, adj) in edges.iter_mut().enumerate() {
            adj.sort_by_key(|&(j, _)| j);
            if adj.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate edge incident to vertex {i}"
                )));
            }
        }
        Ok(Self::from_upper(n, edges))
    }

    /// Validates and imports a dense symmetric matrix: entries must be finite
    /// and nonnegative, the diagonal exactly zero, and `w[i][j] == w[j][i]`
    /// exactly.
    pub fn from_dense(w: &Array2<f64>) -> Result<Self> {
        let n = w.nrows();
        if n == 0 || n != w.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "affinity matrix must be square and nonempty, got {}×{}",
                w.nrows(),
                w.ncols()
            )));
        }
        let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            if w[[i, i]] != 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "affinity diagonal must be zero, found {} at {i}",
                    w[[i, i]]
                )));
            }
            for j in (i + 1)..n {
                let v = w[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "affinity entry ({i}, {j}) = {v} is not a finite nonnegative weight"
                    )));
                }
                if v != w[[j, i]] {
                    return Err(Error::InvalidSpec(format!(
                        "affinity matrix is not symmetric at ({i}, {j})"
                    )));
                }
                if v > 0.0 {
                    edges[i].push((j, v));
                }
            }
        }
        Ok(Self::from_upper(n, edges))
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of stored undirected edges with positive weight.
    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Vertices with zero degree, ascending.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.degrees[i] == 0.0).collect()
    }

    /// Weight of the undirected edge `{i, j}`; zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j || i >= self.n || j >= self.n {
            return 0.0;
        }
        let (a, b) = (i.min(j), i.max(j));
        match self.edges[a].binary_search_by_key(&b, |&(j, _)| j) {
            Ok(pos) => self.edges[a][pos].1,
            Err(_) => 0.0,
        }
    }

    pub(crate) fn upper_edges(&self, i: usize) -> &[(usize, f64)] {
        &self.edges[i]
    }

    /// Materializes the full symmetric matrix.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut w = Array2::zeros((self.n, self.n));
        for (i, adj) in self.edges.iter().enumerate() {
            for &(j, v) in adj {
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
        w
    }

    /// out = W · x over the whole graph.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.fill(0.0);
        for (i, adj) in self.edges.iter().enumerate() {
            for &(j, w) in adj {
                out[i] += w * x[j];
                out[j] += w * x[i];
            }
        }
    }
}

/// Builds `W = |Z| + |Z|ᵀ` from sparse coefficients, preserving sparsity.
pub fn build_affinity(z: &SparseCoefficients) -> AffinityGraph {
    let n = z.num_samples();
    let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (col, entries) in z.columns().iter().enumerate() {
        for e in entries {
            // Coefficient storage forbids diagonal entries, so row != col.
            let (a, b) = (e.row.min(col), e.row.max(col));
            edges[a].push((b, e.value.abs()));
        }
    }
    for adj in edges.iter_mut() {
        adj.sort_by_key(|&(j, _)| j);
        // |Z_ij| and |Z_ji| land on the same undirected edge; merge them.
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(adj.len());
        for &(j, w) in adj.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += w,
                _ => merged.push((j, w)),
            }
        }
        merged.retain(|&(_, w)| w > 0.0);
        *adj = merged;
    }
    AffinityGraph::from_upper(n, edges)
}

/// Builds `W = |Z| + |Z|ᵀ` from dense coefficients.
pub fn build_affinity_dense(z: &DenseCoefficients) -> AffinityGraph {
    let v = z.values();
    let n = v.nrows();
    let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = v[[i, j]].abs() + v[[j, i]].abs();
            if w > 0.0 {
                edges[i].push((j, w));
            }
        }
    }
    AffinityGraph::from_upper(n, edges)
}

/// Output of [`ncut_segment`].
#[derive(Clone, Debug)]
pub struct SegmentationResult {
    /// 1-based cluster labels; main clusters use `1..=p`, isolated vertices
    /// get singleton labels `p+1, p+2, …` in ascending vertex order.
    pub labels: LabelVector,
    /// N×p row-normalized spectral coordinates; rows of isolated vertices are
    /// zero.
    pub embedding: Array2<f64>,
    /// The smallest Laplacian eigenvalues actually used (ascending).
    pub eigenvalues: Array1<f64>,
    /// Final k-means inertia on the embedding.
    pub inertia: f64,
    /// k-means restarts performed.
    pub restarts_used: usize,
    /// Set when the clustering degenerated (empty cluster, or fewer connected
    /// vertices than requested clusters).
    pub warning: Option<String>,
}

struct NormalizedLaplacian<'a> {
    graph: &'a AffinityGraph,
    active: &'a [usize],
    /// Full-length map vertex → active position, `usize::MAX` when inactive.
    pos: &'a [usize],
    inv_sqrt_deg: &'a [f64],
}

impl SymOp for NormalizedLaplacian<'_> {
    fn dim(&self) -> usize {
        self.active.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        for (pi, &v) in self.active.iter().enumerate() {
            for &(j, w) in self.graph.upper_edges(v) {
                let pj = self.pos[j];
                if pj != usize::MAX {
                    let c = w * self.inv_sqrt_deg[pi] * self.inv_sqrt_deg[pj];
                    out[pi] -= c * x[pj];
                    out[pj] -= c * x[pi];
                }
            }
        }
    }
}

/// Segments the graph into `p` clusters by normalized spectral clustering.
///
/// Computes the eigenvectors of the `p` smallest eigenvalues of
/// `L = I − D^{−1/2} W D^{−1/2}` over the non-isolated vertices, normalizes
/// each embedding row to unit length, and clusters the rows with seeded
/// k-means (k-means++ initialization, best of 10 restarts). Isolated vertices
/// are excluded from the eigenproblem and labelled as singletons after the
/// main clusters.
pub fn ncut_segment(w: &AffinityGraph, p: usize, seed: u64) -> Result<SegmentationResult> {
    let n = w.num_vertices();
    if p < 2 {
        return Err(Error::InvalidSpec(format!(
            "segmentation needs at least 2 clusters, got {p}"
        )));
    }
    if p > n {
        return Err(Error::InvalidSpec(format!(
            "cannot split {n} vertices into {p} clusters"
        )));
    }

    let mut pos = vec![usize::MAX; n];
    let mut active = Vec::with_capacity(n);
    for i in 0..n {
        if w.degrees()[i] > 0.0 {
            pos[i] = active.len();
            active.push(i);
        }
    }
    let n_active = active.len();

    if n_active == 0 {
        // Every vertex is isolated: each one is its own cluster.
        let labels = LabelVector::new((1..=n as u32).collect())?;
        return Ok(SegmentationResult {
            labels,
            embedding: Array2::zeros((n, p)),
            eigenvalues: Array1::zeros(0),
            inertia: 0.0,
            restarts_used: 0,
            warning: Some("graph has no edges; every vertex became a singleton".into()),
        });
    }

    let p_eff = p.min(n_active);
    let inv_sqrt_deg: Vec<f64> = active.iter().map(|&i| 1.0 / w.degrees()[i].sqrt()).collect();

    let (vals, vecs) = if n_active <= DENSE_EIGEN_LIMIT {
        let mut lap = Array2::zeros((n_active, n_active));
        for pi in 0..n_active {
            lap[[pi, pi]] = 1.0;
        }
        for (pi, &v) in active.iter().enumerate() {
            for &(j, wgt) in w.upper_edges(v) {
                let pj = pos[j];
                if pj != usize::MAX {
                    let c = wgt * inv_sqrt_deg[pi] * inv_sqrt_deg[pj];
                    lap[[pi, pj]] -= c;
                    lap[[pj, pi]] -= c;
                }
            }
        }
        let (all_vals, all_vecs) = symmetric_eigen(&lap)?;
        (
            all_vals.slice(ndarray::s![..p_eff]).to_owned(),
            all_vecs.slice(ndarray::s![.., ..p_eff]).to_owned(),
        )
    } else {
        let op = NormalizedLaplacian {
            graph: w,
            active: &active,
            pos: &pos,
            inv_sqrt_deg: &inv_sqrt_deg,
        };
        lanczos_smallest(&op, p_eff, LANCZOS_TOL, seed ^ 0x5eed_1a9c_05u64)?
    };

    // Row-normalize the active embedding.
    let mut rows = vecs;
    for mut r in rows.rows_mut() {
        let norm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            r.mapv_inplace(|v| v / norm);
        }
    }

    let km = kmeans::run_kmeans(rows.view(), p_eff, KMEANS_RESTARTS, seed);

    let mut labels = vec![0u32; n];
    for (r, &v) in active.iter().enumerate() {
        labels[v] = (km.labels[r] + 1) as u32;
    }
    for (rank, &v) in w.isolated_vertices().iter().enumerate() {
        labels[v] = (p + rank + 1) as u32;
    }

    let mut embedding = Array2::zeros((n, p));
    for (r, &v) in active.iter().enumerate() {
        for c in 0..p_eff {
            embedding[[v, c]] = rows[[r, c]];
        }
    }

    let warning = if p_eff < p {
        Some(format!(
            "only {n_active} connected vertices for {p} clusters; produced {p_eff}"
        ))
    } else if km.degenerate {
        Some("k-means left a cluster empty (coincident embedding rows)".into())
    } else {
        None
    };

    Ok(SegmentationResult {
        labels: LabelVector::new(labels)?,
        embedding,
        eigenvalues: vals,
        inertia: km.inertia,
        restarts_used: km.restarts_used,
        warning,
    })
}

/// Spectrum used by [`estimate_p`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    /// Gap in the eigenvalues of `W`, sorted descending.
    EigenGap,
    /// Gap in the singular values of `W`; for a symmetric matrix these are
    /// the absolute eigenvalues.
    SvdGap,
}

impl FromStr for GapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen_gap" => Ok(Self::EigenGap),
            "svd_gap" => Ok(Self::SvdGap),
            other => Err(Error::InvalidSpec(format!(
                "unknown gap method '{other}' (expected eigen_gap or svd_gap)"
            ))),
        }
    }
}

impl fmt::Display for GapMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EigenGap => "eigen_gap",
            Self::SvdGap => "svd_gap",
        })
    }
}

/// Estimates the number of clusters as the position of the largest gap in the
/// ordered spectrum of `W`: with values `δ_1 ≥ δ_2 ≥ …`, returns the `i`
/// maximizing `δ_i − δ_{i+1}` (the first such `i` on ties).
pub fn estimate_p(w: &AffinityGraph, method: GapMethod) -> Result<usize> {
    let n = w.num_vertices();
    if n < 2 {
        return Err(Error::InvalidSpec(
            "cluster-count estimation needs at least 2 vertices".into(),
        ));
    }
    let eigvals = symmetric_eigenvalues(&w.to_dense())?;
    let mut vals: Vec<f64> = match method {
        GapMethod::EigenGap => eigvals.to_vec(),
        GapMethod::SvdGap => eigvals.iter().map(|v| v.abs()).collect(),
    };
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut best_i = 0;
    let mut best_gap = f64::NEG_INFINITY;
    for i in 0..n - 1 {
        let gap = vals[i] - vals[i + 1];
        if gap > best_gap {
            best_gap = gap;
            best_i = i;
        }
    }
    Ok(best_i + 1)
}

/// Convenience check used in tests: true when two labelings agree exactly up
/// to a relabeling of cluster ids.
#[cfg(test)]
fn same_partition(a: &LabelVector, b: &LabelVector) -> bool {
    crate::metrics::sce(a, b).map(|e| e == 0.0).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SparseEntry;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Block-diagonal all-ones affinity (diagonal zeroed) for equal blocks.
    fn block_graph(blocks: usize, size: usize) -> (AffinityGraph, LabelVector) {
        let n = blocks * size;
        let mut edges = Vec::new();
        let mut truth = Vec::new();
        for b in 0..blocks {
            for i in 0..size {
                truth.push((b + 1) as u32);
                for j in (i + 1)..size {
                    edges.push((b * size + i, b * size + j, 1.0));
                }
            }
        }
        (
            AffinityGraph::from_edges(n, &edges).unwrap(),
            LabelVector::new(truth).unwrap(),
        )
    }

    #[test]
    fn single_coefficient_becomes_symmetric_edge() {
        let z = SparseCoefficients::from_columns(
            3,
            vec![
                vec![SparseEntry { row: 1, value: -3.0 }],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let w = build_affinity(&z);
        assert_eq!(w.weight(0, 1), 3.0);
        assert_eq!(w.weight(1, 0), 3.0);
        assert_eq!(w.num_edges(), 1);
        assert_eq!(w.degrees(), &[3.0, 3.0, 0.0]);
    }

    #[test]
    fn zero_coefficients_give_empty_graph() {
        let z = SparseCoefficients::from_columns(4, vec![vec![]; 4]).unwrap();
        let w = build_affinity(&z);
        assert_eq!(w.num_edges(), 0);
        assert_eq!(w.isolated_vertices(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn affinity_is_exactly_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let mut cols = Vec::new();
        for c in 0..n {
            let mut col = Vec::new();
            for r in 0..n {
                if r != c && rng.random::<f64>() < 0.3 {
                    col.push(SparseEntry {
                        row: r,
                        value: rng.random::<f64>() * 2.0 - 1.0,
                    });
                }
            }
            cols.push(col);
        }
        let z = SparseCoefficients::from_columns(n, cols).unwrap();
        let w = build_affinity(&z).to_dense();
        for i in 0..n {
            assert_eq!(w[[i, i]], 0.0);
            for j in 0..n {
                assert_eq!(w[[i, j]], w[[j, i]]);
            }
        }
    }

    #[test]
    fn dense_and_sparse_affinity_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10;
        let mut cols = Vec::new();
        for c in 0..n {
            let mut col = Vec::new();
            for r in 0..n {
                if r != c && rng.random::<f64>() < 0.4 {
                    col.push(SparseEntry {
                        row: r,
                        value: rng.random::<f64>() - 0.5,
                    });
                }
            }
            cols.push(col);
        }
        let z = SparseCoefficients::from_columns(n, cols).unwrap();
        let dense = DenseCoefficients::new(z.to_dense()).unwrap();
        let a = build_affinity(&z).to_dense();
        let b = build_affinity_dense(&dense).to_dense();
        assert_eq!(a, b);
    }

    #[test]
    fn from_dense_validates() {
        assert!(AffinityGraph::from_dense(&array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(AffinityGraph::from_dense(&array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(AffinityGraph::from_dense(&array![[0.5, 1.0], [1.0, 0.0]]).is_err());
        let w = array![[0.0, 2.0], [2.0, 0.0]];
        let g = AffinityGraph::from_dense(&w).unwrap();
        assert_eq!(g.to_dense(), w);
    }

    #[test]
    fn block_diagonal_components_are_recovered() {
        let (w, truth) = block_graph(3, 10);
        let seg = ncut_segment(&w, 3, 1).unwrap();
        assert_eq!(crate::metrics::sce(&seg.labels, &truth).unwrap(), 0.0);
        assert!(seg.warning.is_none());
        assert_eq!(seg.embedding.nrows(), 30);
        assert_eq!(seg.embedding.ncols(), 3);
        // Three disconnected components: the Laplacian has eigenvalue 0 with
        // multiplicity 3.
        for &v in seg.eigenvalues.iter() {
            assert!(v.abs() < 1e-8, "eigenvalue {v}");
        }
    }

    #[test]
    fn tiny_cross_block_leak_does_not_change_labels() {
        let (w0, _) = block_graph(3, 8);
        let mut dense = w0.to_dense();
        // Weak links between consecutive blocks.
        dense[[0, 8]] = 1e-9;
        dense[[8, 0]] = 1e-9;
        dense[[9, 16]] = 1e-9;
        dense[[16, 9]] = 1e-9;
        let w1 = AffinityGraph::from_dense(&dense).unwrap();
        let a = ncut_segment(&w0, 3, 4).unwrap();
        let b = ncut_segment(&w1, 3, 4).unwrap();
        assert!(same_partition(&a.labels, &b.labels));
    }

    #[test]
    fn p_equal_n_gives_singletons() {
        // Weighted path graph with distinct weights.
        let edges = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (3, 4, 4.0)];
        let w = AffinityGraph::from_edges(5, &edges).unwrap();
        let seg = ncut_segment(&w, 5, 2).unwrap();
        assert_eq!(seg.labels.distinct().len(), 5);
    }

    #[test]
    fn labels_invariant_under_global_rescaling() {
        let (w, _) = block_graph(4, 6);
        let scaled = AffinityGraph::from_dense(&(w.to_dense() * 7.5)).unwrap();
        let a = ncut_segment(&w, 4, 13).unwrap();
        let b = ncut_segment(&scaled, 4, 13).unwrap();
        assert!(same_partition(&a.labels, &b.labels));
    }

    #[test]
    fn isolated_vertex_gets_singleton_label() {
        let (blocks, truth) = block_graph(2, 4);
        let mut dense = Array2::zeros((9, 9));
        dense
            .slice_mut(ndarray::s![..8, ..8])
            .assign(&blocks.to_dense());
        let w = AffinityGraph::from_dense(&dense).unwrap();
        let seg = ncut_segment(&w, 2, 3).unwrap();
        assert_eq!(seg.labels.as_slice()[8], 3);
        let head = LabelVector::new(seg.labels.as_slice()[..8].to_vec()).unwrap();
        assert_eq!(crate::metrics::sce(&head, &truth).unwrap(), 0.0);
        // Isolated row of the embedding stays zero.
        assert!(seg.embedding.row(8).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn random_disconnected_components_recovered_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for trial in 0..5 {
            let p = 2 + (trial % 4);
            let sizes: Vec<usize> = (0..p).map(|_| 5 + rng.random_range(0..20)).collect();
            let n: usize = sizes.iter().sum();
            let mut edges = Vec::new();
            let mut truth = Vec::new();
            let mut offset = 0;
            for (b, &sz) in sizes.iter().enumerate() {
                for i in 0..sz {
                    truth.push((b + 1) as u32);
                    for j in (i + 1)..sz {
                        edges.push((offset + i, offset + j, 0.5 + rng.random::<f64>()));
                    }
                }
                offset += sz;
            }
            let w = AffinityGraph::from_edges(n, &edges).unwrap();
            let truth = LabelVector::new(truth).unwrap();
            let seg = ncut_segment(&w, p, 1000 + trial as u64).unwrap();
            assert_eq!(
                crate::metrics::sce(&seg.labels, &truth).unwrap(),
                0.0,
                "trial {trial} with sizes {sizes:?}"
            );
        }
    }

    #[test]
    fn segment_validates_p() {
        let (w, _) = block_graph(2, 4);
        assert!(ncut_segment(&w, 1, 0).is_err());
        assert!(ncut_segment(&w, 9, 0).is_err());
    }

    #[test]
    fn gap_estimate_finds_block_count() {
        for p in 2..=8 {
            let (w, _) = block_graph(p, 6);
            assert_eq!(estimate_p(&w, GapMethod::EigenGap).unwrap(), p);
            assert_eq!(estimate_p(&w, GapMethod::SvdGap).unwrap(), p);
        }
    }

    #[test]
    fn single_block_estimates_one() {
        let (w, _) = block_graph(1, 8);
        assert_eq!(estimate_p(&w, GapMethod::EigenGap).unwrap(), 1);
    }

    #[test]
    fn flat_spectrum_returns_first_index() {
        let w = AffinityGraph::from_edges(4, &[]).unwrap();
        assert_eq!(estimate_p(&w, GapMethod::EigenGap).unwrap(), 1);
        assert_eq!(estimate_p(&w, GapMethod::SvdGap).unwrap(), 1);
    }

    #[test]
    fn gap_method_parses() {
        assert_eq!("eigen_gap".parse::<GapMethod>().unwrap(), GapMethod::EigenGap);
        assert_eq!("svd_gap".parse::<GapMethod>().unwrap(), GapMethod::SvdGap);
        assert!("laplacian".parse::<GapMethod>().is_err());
        assert_eq!(GapMethod::EigenGap.to_string(), "eigen_gap");
    }

    #[test]
    fn matvec_matches_dense_product() {
        let (w, _) = block_graph(2, 5);
        let dense = w.to_dense();
        let x: Vec<f64> = (0..10).map(|i| (i as f64) - 4.5).collect();
        let mut out = vec![0.0; 10];
        w.matvec(&x, &mut out);
        for i in 0..10 {
            let expect: f64 = (0..10).map(|j| dense[[i, j]] * x[j]).sum();
            assert!((out[i] - expect).abs() < 1e-12);
        }
    }
}
