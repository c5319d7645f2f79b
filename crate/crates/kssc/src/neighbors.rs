//! Exact k-nearest-neighbour candidate selection and the theory helpers that
//! predict when those candidates stay inside the correct subspace.
//!
//! Neighbour sets are the support restriction used by the sparse solvers: for
//! each column `i`, the solver may only spend coefficients on the `k` columns
//! closest to `i` in Euclidean distance (self excluded, ties broken toward the
//! smaller index). Everything here is deterministic.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DataMatrix, LabelVector};
use crate::error::{Error, Result};

/// One neighbour set per column. In memory the indices are 0-based and sorted
/// ascending; the CSV format is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSets {
    requested_k: usize,
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl NeighborSets {
    /// Effective neighbourhood size (after any clamping).
    pub fn k(&self) -> usize {
        self.k
    }

    /// The k that was asked for before clamping.
    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    /// True when the request exceeded `N-1` and was clamped.
    pub fn clamped(&self) -> bool {
        self.requested_k != self.k
    }

    /// Number of columns covered.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Neighbour indices of column `i`, ascending.
    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Builds sets directly, validating sizes, bounds, self-exclusion and
    /// duplicates. Intended for loading and for tests that construct
    /// hand-picked supports.
    pub fn from_sets(sets: Vec<Vec<usize>>, requested_k: usize) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::DegenerateInput("no neighbour sets".into()));
        }
        let n = sets.len();
        let k = sets[0].len();
        if k == 0 {
            return Err(Error::InvalidSpec("neighbour sets must be non-empty".into()));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "column {i} has {} neighbours, expected {k}",
                    set.len()
                )));
            }
            let mut prev: Option<usize> = None;
            for &j in set {
                if j >= n {
                    return Err(Error::InvalidSpec(format!(
                        "column {i} references neighbour {j} outside 0..{n}"
                    )));
                }
                if j == i {
                    return Err(Error::InvalidSpec(format!(
                        "column {i} lists itself as a neighbour"
                    )));
                }
                if let Some(p) = prev {
                    if j <= p {
                        return Err(Error::InvalidSpec(format!(
                            "column {i} neighbours must be strictly ascending"
                        )));
                    }
                }
                prev = Some(j);
            }
        }
        Ok(Self {
            requested_k,
            k,
            sets,
        })
    }
}

/// Exact k-nearest neighbours of every column under Euclidean distance.
///
/// Self-matches are excluded and distance ties resolve toward the smaller
/// column index, so the output is a pure function of the input. A request of
/// `k >= N` is clamped to `N-1`, observable through
/// [`NeighborSets::clamped`].
pub fn knn_select(x: &DataMatrix, k: usize) -> Result<NeighborSets> {
    let ranking = knn_rank(x, k)?;
    Ok(ranking.prefix(ranking.k_max()))
}

/// Full neighbour ranking up to `k_max` (clamped to `N-1`), from which any
/// smaller neighbourhood is a prefix.
pub fn knn_rank(x: &DataMatrix, k_max: usize) -> Result<NeighborRanking> {
    let n = x.num_samples();
    if n < 2 {
        return Err(Error::DegenerateInput(
            "need at least two columns to pick neighbours".into(),
        ));
    }
    if k_max == 0 {
        return Err(Error::InvalidSpec("k must be at least 1".into()));
    }
    let effective = k_max.min(n - 1);
    let values = x.values();
    let d = x.ambient_dim();

    let ranked: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let mut acc = 0.0;
                for r in 0..d {
                    let diff = values[[r, i]] - values[[r, j]];
                    acc += diff * diff;
                }
                dists.push((acc, j));
            }
            dists.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite distances")
                    .then(a.1.cmp(&b.1))
            });
            dists.truncate(effective);
            dists.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    Ok(NeighborRanking {
        requested_k: k_max,
        k_max: effective,
        ranked,
    })
}

/// Neighbours of every column ordered by increasing distance (ties toward the
/// smaller index), so that the first `k` entries of each row are exactly the
/// k-nearest neighbourhood.
#[derive(Clone, Debug)]
pub struct NeighborRanking {
    requested_k: usize,
    k_max: usize,
    ranked: Vec<Vec<usize>>,
}

impl NeighborRanking {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Neighbour sets for any `k <= k_max`; guarantees the prefix property
    /// that smaller neighbourhoods are subsets of larger ones.
    pub fn prefix(&self, k: usize) -> NeighborSets {
        let k = k.min(self.k_max).max(1);
        let sets = self
            .ranked
            .iter()
            .map(|row| {
                let mut set: Vec<usize> = row[..k].to_vec();
                set.sort_unstable();
                set
            })
            .collect();
        NeighborSets {
            requested_k: if k == self.k_max { self.requested_k } else { k },
            k,
            sets,
        }
    }

    /// Ranked neighbours (by distance) of column `i`.
    pub fn ranked(&self, i: usize) -> &[usize] {
        &self.ranked[i]
    }
}

/// How well neighbour sets respect the true segmentation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NeighborQuality {
    pub k: usize,
    /// Mean number of same-subspace neighbours per column.
    pub mean_true_positives: f64,
    /// Mean number of wrong-subspace neighbours per column.
    pub mean_false_positives: f64,
    pub per_column_true: Vec<usize>,
    pub per_column_false: Vec<usize>,
}

impl NeighborQuality {
    /// Mean fraction of neighbours from the correct subspace.
    pub fn true_positive_rate(&self) -> f64 {
        self.mean_true_positives / self.k as f64
    }

    /// Fraction of columns whose neighbourhood contains no wrong-subspace point.
    pub fn zero_false_positive_fraction(&self) -> f64 {
        let clean = self.per_column_false.iter().filter(|&&f| f == 0).count();
        clean as f64 / self.per_column_false.len() as f64
    }
}

/// Scores neighbour sets against ground-truth labels.
pub fn neighbor_quality(omega: &NeighborSets, truth: &LabelVector) -> Result<NeighborQuality> {
    if omega.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} neighbour sets vs {} labels",
            omega.len(),
            truth.len()
        )));
    }
    let labels = truth.as_slice();
    let mut per_true = Vec::with_capacity(omega.len());
    let mut per_false = Vec::with_capacity(omega.len());
    for (i, set) in omega.sets().iter().enumerate() {
        let mine = labels[i];
        let tp = set.iter().filter(|&&j| labels[j] == mine).count();
        per_true.push(tp);
        per_false.push(set.len() - tp);
    }
    let n = omega.len() as f64;
    Ok(NeighborQuality {
        k: omega.k(),
        mean_true_positives: per_true.iter().sum::<usize>() as f64 / n,
        mean_false_positives: per_false.iter().sum::<usize>() as f64 / n,
        per_column_true: per_true,
        per_column_false: per_false,
    })
}

/// Affinity between two subspaces given orthonormal bases: the root mean
/// squared cosine of the principal angles,
/// `||U1^T U2||_F / sqrt(min(d1, d2))`. 1 means one subspace contains the
/// other; 0 means they are orthogonal.
pub fn affinity_between(u1: &Array2<f64>, u2: &Array2<f64>) -> Result<f64> {
    if u1.nrows() != u2.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "bases live in different ambient dimensions: {} vs {}",
            u1.nrows(),
            u2.nrows()
        )));
    }
    check_orthonormal(u1, "first")?;
    check_orthonormal(u2, "second")?;
    let d1 = u1.ncols();
    let d2 = u2.ncols();
    let mut fro = 0.0;
    for i in 0..d1 {
        for j in 0..d2 {
            let mut acc = 0.0;
            for r in 0..u1.nrows() {
                acc += u1[[r, i]] * u2[[r, j]];
            }
            fro += acc * acc;
        }
    }
    Ok((fro / d1.min(d2) as f64).sqrt())
}

fn check_orthonormal(u: &Array2<f64>, which: &str) -> Result<()> {
    let d = u.ncols();
    if d == 0 || u.nrows() == 0 {
        return Err(Error::DegenerateInput(format!("{which} basis is empty")));
    }
    for i in 0..d {
        for j in i..d {
            let mut acc = 0.0;
            for r in 0..u.nrows() {
                acc += u[[r, i]] * u[[r, j]];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            if (acc - expect).abs() > 1e-8 {
                return Err(Error::DegenerateInput(format!(
                    "{which} basis is not orthonormal (gram[{i},{j}] = {acc})"
                )));
            }
        }
    }
    Ok(())
}

/// Inputs for the neighbour-purity guarantee, which predicts the probability
/// that every selected neighbour of a point comes from the point's own
/// subspace. Data are assumed rescaled to the unit sphere.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TheoremBoundParams {
    /// Patch radius parameter epsilon in (0, sqrt(2)).
    pub epsilon: f64,
    /// Tail parameter t > 0.
    pub tail: f64,
    /// Concentration count k0 > 0; the neighbourhood size is k = k0 / C.
    pub k0: f64,
    /// Oversampling constant C > 1.
    pub concentration: f64,
    /// Points sampled per subspace (the N_l in the logarithmic term).
    pub samples: usize,
    /// Dimension entering the cross-subspace inner-product bound (the smaller
    /// dimension of the interacting pair).
    pub subspace_dim: usize,
    /// Minimum subspace dimension across the arrangement.
    pub min_subspace_dim: usize,
    /// Measured affinity between the closest pair of subspaces.
    pub affinity: f64,
    /// Present when the data carry additive Gaussian noise.
    pub noise: Option<NoiseBoundParams>,
}

/// Noise terms of the guarantee.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseBoundParams {
    /// Slack delta > 0 absorbed by the noise inner products.
    pub delta: f64,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Ambient dimension (the tail term grows with it).
    pub ambient_dim: usize,
    /// Sub-Gaussian constant c of a standard Gaussian; defaults to 1/8.
    #[serde(default = "default_sub_gaussian_c")]
    pub sub_gaussian_c: f64,
}

pub fn default_sub_gaussian_c() -> f64 {
    0.125
}

/// Evaluated guarantee: the affinity threshold the arrangement must satisfy
/// and the success probability when it does.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TheoremBound {
    /// Affinities at or below this admit the guarantee.
    pub affinity_threshold: f64,
    /// Whether the supplied affinity satisfies the threshold.
    pub affinity_ok: bool,
    /// Success probability clamped to [0, 1].
    pub success_probability: f64,
    /// Unclamped value; may be negative when the tail terms dominate.
    pub success_probability_raw: f64,
    /// Neighbourhood size k = k0 / C covered by the guarantee.
    pub neighbors: f64,
}

/// Evaluates the neighbour-purity guarantee for the given parameters.
///
/// Clean data succeed with probability at least
/// `1 - 2 e^{-t} - e^{-k0} (eC)^{k0/C}` whenever the affinity stays below
/// `sqrt(d_m) (1 - eps^2/2) / (2 sqrt(d (t ln N + t^2)))`. With noise the
/// numerator drops by `6 delta` and the probability additionally loses
/// `2 exp(1 - c delta^2 / sigma^2) + D sigma^4 / delta^2`.
pub fn check_theorem_bound(params: &TheoremBoundParams) -> Result<TheoremBound> {
    if !(params.epsilon > 0.0) || params.epsilon * params.epsilon >= 2.0 {
        return Err(Error::InvalidSpec(format!(
            "epsilon must lie in (0, sqrt(2)), got {}",
            params.epsilon
        )));
    }
    if !(params.tail > 0.0) {
        return Err(Error::InvalidSpec("tail parameter t must be positive".into()));
    }
    if !(params.k0 > 0.0) {
        return Err(Error::InvalidSpec("k0 must be positive".into()));
    }
    if !(params.concentration > 1.0) {
        return Err(Error::InvalidSpec("C must exceed 1".into()));
    }
    if params.samples < 1 {
        return Err(Error::InvalidSpec("samples per subspace must be >= 1".into()));
    }
    if params.subspace_dim == 0 || params.min_subspace_dim == 0 {
        return Err(Error::InvalidSpec("subspace dimensions must be positive".into()));
    }
    if !(0.0..=1.0).contains(&params.affinity) {
        return Err(Error::InvalidSpec(format!(
            "affinity must lie in [0, 1], got {}",
            params.affinity
        )));
    }
    if let Some(noise) = &params.noise {
        if !(noise.delta > 0.0) || !(noise.sigma > 0.0) || !(noise.sub_gaussian_c > 0.0) {
            return Err(Error::InvalidSpec(
                "noise parameters delta, sigma and c must be positive".into(),
            ));
        }
        if noise.ambient_dim == 0 {
            return Err(Error::InvalidSpec("ambient dimension must be positive".into()));
        }
    }

    let t = params.tail;
    let k0 = params.k0;
    let c_over = params.concentration;
    let mut raw = 1.0 - 2.0 * (-t).exp() - (-k0).exp() * (std::f64::consts::E * c_over).powf(k0 / c_over);

    let mut numer = 1.0 - params.epsilon * params.epsilon / 2.0;
    if let Some(noise) = &params.noise {
        numer -= 6.0 * noise.delta;
        let d2s2 = noise.delta * noise.delta / (noise.sigma * noise.sigma);
        raw -= 2.0 * (1.0 - noise.sub_gaussian_c * d2s2).exp();
        raw -= noise.ambient_dim as f64 * noise.sigma.powi(4) / (noise.delta * noise.delta);
    }

    let log_term = t * (params.samples as f64).ln() + t * t;
    let threshold =
        (params.min_subspace_dim as f64).sqrt() * numer / (2.0 * (params.subspace_dim as f64 * log_term).sqrt());

    Ok(TheoremBound {
        affinity_threshold: threshold,
        affinity_ok: params.affinity <= threshold,
        success_probability: raw.clamp(0.0, 1.0),
        success_probability_raw: raw,
        neighbors: k0 / c_over,
    })
}

/// Writes neighbour sets as headerless CSV: row `i` holds the neighbours of
/// column `i` as 1-based indices, ascending.
pub fn save_neighbors(path: impl AsRef<Path>, omega: &NeighborSets) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    for set in omega.sets() {
        let mut line = String::new();
        for (pos, &j) in set.iter().enumerate() {
            if pos > 0 {
                line.push(',');
            }
            line.push_str(&(j + 1).to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads neighbour sets written by [`save_neighbors`].
pub fn load_neighbors(path: impl AsRef<Path>) -> Result<NeighborSets> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut set = Vec::new();
        for field in line.split(',') {
            let idx: usize = field.trim().parse().map_err(|_| Error::Format {
                path: path.display().to_string(),
                reason: format!("line {}: '{}' is not an index", lineno + 1, field.trim()),
            })?;
            if idx == 0 {
                return Err(Error::Format {
                    path: path.display().to_string(),
                    reason: format!("line {}: indices are 1-based", lineno + 1),
                });
            }
            set.push(idx - 1);
        }
        sets.push(set);
    }
    let k = sets.first().map(|s| s.len()).unwrap_or(0);
    NeighborSets::from_sets(sets, k).map_err(|e| Error::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}
