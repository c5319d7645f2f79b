//! Synthetic data generation for union-of-subspace experiments, plus the
//! on-disk formats for matrices and label vectors.
//!
//! A dataset is a `D x N` matrix whose columns are sample points, together with
//! a label vector assigning each column to the subspace (1-based id) that
//! produced it. Generation is fully deterministic: the same [`SyntheticSpec`]
//! (including its seed) always yields a bit-identical matrix.
//!
//! The random draw order is part of the contract:
//! 1. subspace bases (standard Gaussian matrices, column by column, then
//!    orthonormalized),
//! 2. coefficients (per subspace, per point, one draw per coordinate),
//! 3. the noise matrix, when a finite PSNR target is set.

pub mod io;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Dense `D x N` sample matrix whose columns are data points.
#[derive(Clone, Debug)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    /// Wraps a dense array, rejecting empty shapes and non-finite entries.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::DegenerateInput(format!(
                "matrix must be non-empty, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(
                "matrix contains NaN or infinite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    /// Ambient dimension `D` (number of rows).
    pub fn ambient_dim(&self) -> usize {
        self.values.nrows()
    }

    /// Number of sample points `N` (number of columns).
    pub fn num_samples(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.column(i)
    }

    /// Copies the listed columns into a new `D x len` matrix, in the given order.
    pub fn gather_columns(&self, indices: &[usize]) -> Array2<f64> {
        let d = self.ambient_dim();
        let mut out = Array2::<f64>::zeros((d, indices.len()));
        for (pos, &idx) in indices.iter().enumerate() {
            for r in 0..d {
                out[[r, pos]] = self.values[[r, idx]];
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry; the peak value `s` used by PSNR targets.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Cluster assignment for each column of a [`DataMatrix`]; ids are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<u32>,
}

impl LabelVector {
    /// Wraps a label list; every id must be >= 1 and the list non-empty.
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::DegenerateInput("label vector is empty".into()));
        }
        if let Some(pos) = labels.iter().position(|&l| l == 0) {
            return Err(Error::DegenerateInput(format!(
                "label at position {pos} is 0; ids are 1-based"
            )));
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.labels
    }

    /// Sorted list of distinct ids present.
    pub fn distinct(&self) -> Vec<u32> {
        let mut ids = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Distribution of the coordinates of each point inside its subspace basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// Independent draws from `[0, 1)`.
    Uniform,
    /// Independent draws from `N(mean, variance)`, applied per coordinate.
    Gaussian { mean: f64, variance: f64 },
}

impl Default for CoefficientLaw {
    fn default() -> Self {
        CoefficientLaw::Uniform
    }
}

/// Recipe for one synthetic union-of-subspaces dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_subspaces: usize,
    /// Intrinsic dimension of each subspace; length must equal `num_subspaces`.
    pub subspace_dims: Vec<usize>,
    /// Points sampled from each subspace; length must equal `num_subspaces`.
    pub points_per_subspace: Vec<usize>,
    pub ambient_dim: usize,
    #[serde(default)]
    pub coefficient_law: CoefficientLaw,
    /// Number of shared basis directions between two subspaces. Zero means the
    /// bases are drawn independently. A positive value requires exactly two
    /// subspaces of equal dimension `d` and builds them from one orthonormal
    /// pool of `2d - t` directions: the first `d` span the first subspace, the
    /// last `d` the second, so they intersect in a `t`-dimensional subspace.
    #[serde(default)]
    pub shared_basis_count: usize,
    /// Target PSNR in dB for additive Gaussian noise; omit (or use infinity)
    /// for clean data.
    #[serde(default)]
    pub noise_psnr_db: Option<f64>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Convenience constructor for `p` subspaces of equal dimension and size.
    pub fn uniform(
        num_subspaces: usize,
        subspace_dim: usize,
        points_per_subspace: usize,
        ambient_dim: usize,
        seed: u64,
    ) -> Self {
        Self {
            num_subspaces,
            subspace_dims: vec![subspace_dim; num_subspaces],
            points_per_subspace: vec![points_per_subspace; num_subspaces],
            ambient_dim,
            coefficient_law: CoefficientLaw::Uniform,
            shared_basis_count: 0,
            noise_psnr_db: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_subspaces == 0 {
            return Err(Error::InvalidSpec("need at least one subspace".into()));
        }
        if self.subspace_dims.len() != self.num_subspaces {
            return Err(Error::InvalidSpec(format!(
                "subspace_dims has {} entries for {} subspaces",
                self.subspace_dims.len(),
                self.num_subspaces
            )));
        }
        if self.points_per_subspace.len() != self.num_subspaces {
            return Err(Error::InvalidSpec(format!(
                "points_per_subspace has {} entries for {} subspaces",
                self.points_per_subspace.len(),
                self.num_subspaces
            )));
        }
        if self.ambient_dim == 0 {
            return Err(Error::InvalidSpec("ambient_dim must be positive".into()));
        }
        for (i, &d) in self.subspace_dims.iter().enumerate() {
            if d == 0 {
                return Err(Error::InvalidSpec(format!("subspace {i} has dimension 0")));
            }
            if d > self.ambient_dim {
                return Err(Error::InvalidSpec(format!(
                    "subspace {i} has dimension {d} > ambient_dim {}",
                    self.ambient_dim
                )));
            }
        }
        for (i, &n) in self.points_per_subspace.iter().enumerate() {
            if n == 0 {
                return Err(Error::InvalidSpec(format!("subspace {i} has 0 points")));
            }
        }
        if self.shared_basis_count > 0 {
            let t = self.shared_basis_count;
            if self.num_subspaces != 2 {
                return Err(Error::InvalidSpec(
                    "shared_basis_count > 0 requires exactly two subspaces".into(),
                ));
            }
            let d = self.subspace_dims[0];
            if self.subspace_dims[1] != d {
                return Err(Error::InvalidSpec(
                    "shared_basis_count > 0 requires equal subspace dimensions".into(),
                ));
            }
            if t > d {
                return Err(Error::InvalidSpec(format!(
                    "shared_basis_count {t} exceeds subspace dimension {d}"
                )));
            }
            if 2 * d - t > self.ambient_dim {
                return Err(Error::InvalidSpec(format!(
                    "basis pool of {} directions does not fit in ambient_dim {}",
                    2 * d - t,
                    self.ambient_dim
                )));
            }
        }
        if let CoefficientLaw::Gaussian { mean, variance } = self.coefficient_law {
            if !mean.is_finite() {
                return Err(Error::InvalidSpec("coefficient mean must be finite".into()));
            }
            if !(variance > 0.0) || !variance.is_finite() {
                return Err(Error::InvalidSpec(
                    "coefficient variance must be positive and finite".into(),
                ));
            }
        }
        if let Some(psnr) = self.noise_psnr_db {
            if psnr.is_nan() {
                return Err(Error::InvalidSpec("noise_psnr_db is NaN".into()));
            }
        }
        Ok(())
    }

    /// Total number of points across all subspaces.
    pub fn total_points(&self) -> usize {
        self.points_per_subspace.iter().sum()
    }
}

/// Output of [`generate_union`]: the sample matrix (noisy if the spec asked
/// for noise), labels, the orthonormal basis of each subspace, and the clean
/// matrix when noise was applied.
#[derive(Clone, Debug)]
pub struct GeneratedUnion {
    pub matrix: DataMatrix,
    pub labels: LabelVector,
    pub bases: Vec<Array2<f64>>,
    pub clean: Option<DataMatrix>,
}

/// Samples a union of random subspaces according to `spec`.
///
/// Each basis is the orthonormalization of a standard Gaussian matrix; each
/// point is `U_l * c` with `c` drawn from the coefficient law. When the spec
/// sets a finite `noise_psnr_db`, Gaussian noise rescaled to hit that PSNR
/// exactly is added and the clean matrix is kept alongside.
pub fn generate_union(spec: &SyntheticSpec) -> Result<GeneratedUnion> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d_ambient = spec.ambient_dim;

    let bases = draw_bases(spec, &mut rng)?;

    let n_total = spec.total_points();
    let mut matrix = Array2::<f64>::zeros((d_ambient, n_total));
    let mut labels = Vec::with_capacity(n_total);
    let mut col = 0usize;
    for (l, basis) in bases.iter().enumerate() {
        let d = spec.subspace_dims[l];
        for _ in 0..spec.points_per_subspace[l] {
            let coeff = draw_coefficients(spec.coefficient_law, d, &mut rng);
            for r in 0..d_ambient {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += basis[[r, j]] * coeff[j];
                }
                matrix[[r, col]] = acc;
            }
            labels.push((l + 1) as u32);
            col += 1;
        }
    }

    let clean = DataMatrix::new(matrix)?;
    let labels = LabelVector::new(labels)?;

    match spec.noise_psnr_db {
        Some(psnr) if psnr.is_finite() => {
            let noisy = add_noise_with_rng(&clean, psnr, &mut rng)?;
            Ok(GeneratedUnion {
                matrix: noisy,
                labels,
                bases,
                clean: Some(clean),
            })
        }
        _ => Ok(GeneratedUnion {
            matrix: clean,
            labels,
            bases,
            clean: None,
        }),
    }
}

fn draw_bases(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Array2<f64>>> {
    let d_ambient = spec.ambient_dim;
    if spec.shared_basis_count > 0 {
        let d = spec.subspace_dims[0];
        let t = spec.shared_basis_count;
        let pool_cols = 2 * d - t;
        let mut pool = gaussian_matrix(d_ambient, pool_cols, rng);
        linalg::orthonormalize_columns(&mut pool)?;
        let first = pool.slice(ndarray::s![.., 0..d]).to_owned();
        let second = pool.slice(ndarray::s![.., (d - t)..pool_cols]).to_owned();
        Ok(vec![first, second])
    } else {
        let mut bases = Vec::with_capacity(spec.num_subspaces);
        for &d in &spec.subspace_dims {
            let mut g = gaussian_matrix(d_ambient, d, rng);
            linalg::orthonormalize_columns(&mut g)?;
            bases.push(g);
        }
        Ok(bases)
    }
}

/// Fills a matrix column by column with standard normal draws.
fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut g = Array2::<f64>::zeros((rows, cols));
    for c in 0..cols {
        for r in 0..rows {
            g[[r, c]] = rng.sample(StandardNormal);
        }
    }
    g
}

fn draw_coefficients(law: CoefficientLaw, d: usize, rng: &mut ChaCha8Rng) -> Array1<f64> {
    let mut c = Array1::<f64>::zeros(d);
    match law {
        CoefficientLaw::Uniform => {
            for v in c.iter_mut() {
                *v = rng.random::<f64>();
            }
        }
        CoefficientLaw::Gaussian { mean, variance } => {
            let sigma = variance.sqrt();
            for v in c.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v = mean + sigma * z;
            }
        }
    }
    c
}

/// Adds Gaussian noise scaled so the realized PSNR against `x` equals
/// `target_psnr_db` exactly (peak taken as the largest absolute entry of `x`).
/// An infinite target returns the matrix unchanged.
pub fn add_noise(x: &DataMatrix, target_psnr_db: f64, seed: u64) -> Result<DataMatrix> {
    if target_psnr_db.is_nan() {
        return Err(Error::InvalidSpec("PSNR target is NaN".into()));
    }
    if target_psnr_db.is_infinite() {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_noise_with_rng(x, target_psnr_db, &mut rng)
}

fn add_noise_with_rng(x: &DataMatrix, target_psnr_db: f64, rng: &mut ChaCha8Rng) -> Result<DataMatrix> {
    let s = x.peak();
    if s <= 0.0 {
        return Err(Error::DegenerateInput(
            "cannot target a PSNR on an all-zero matrix".into(),
        ));
    }
    let (rows, cols) = x.values().dim();
    let target_mse = s * s * 10f64.powf(-target_psnr_db / 10.0);

    let mut noise = Array2::<f64>::zeros((rows, cols));
    for c in 0..cols {
        for r in 0..rows {
            noise[[r, c]] = rng.sample(StandardNormal);
        }
    }
    let ms: f64 = noise.iter().map(|v| v * v).sum::<f64>() / (rows * cols) as f64;
    if ms <= 0.0 {
        return Err(Error::DegenerateInput("noise draw collapsed to zero".into()));
    }
    let scale = (target_mse / ms).sqrt();
    let mut out = x.values().clone();
    for c in 0..cols {
        for r in 0..rows {
            out[[r, c]] += scale * noise[[r, c]];
        }
    }
    DataMatrix::new(out)
}

/// Rescales every column to unit Euclidean norm. A zero column is an error
/// naming the offending index.
pub fn normalize_columns(x: &DataMatrix) -> Result<DataMatrix> {
    let mut out = x.values().clone();
    for c in 0..out.ncols() {
        let norm = linalg::view_norm2(out.column(c));
        if norm < 1e-300 {
            return Err(Error::DegenerateInput(format!(
                "column {c} has zero norm and cannot be normalized"
            )));
        }
        for r in 0..out.nrows() {
            out[[r, c]] /= norm;
        }
    }
    DataMatrix::new(out)
}

/// Random orthonormal library of `count` directions in dimension `ambient_dim`,
/// for semi-synthetic experiments that select subspace bases from a fixed pool
/// of signature vectors.
pub fn random_orthonormal_library(ambient_dim: usize, count: usize, seed: u64) -> Result<DataMatrix> {
    if count == 0 || ambient_dim == 0 {
        return Err(Error::InvalidSpec("library must be non-empty".into()));
    }
    if count > ambient_dim {
        return Err(Error::InvalidSpec(format!(
            "cannot fit {count} orthonormal directions in dimension {ambient_dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = gaussian_matrix(ambient_dim, count, &mut rng);
    linalg::orthonormalize_columns(&mut g)?;
    DataMatrix::new(g)
}

/// Output of [`generate_from_library`].
#[derive(Clone, Debug)]
pub struct LibraryUnion {
    pub matrix: DataMatrix,
    pub labels: LabelVector,
    /// Library column indices chosen as the basis of each subspace.
    pub selected: Vec<Vec<usize>>,
}

/// Builds a union of subspaces whose bases are columns drawn from a fixed
/// library matrix (for example a bank of measured signatures). For each
/// subspace, `basis_per_subspace` distinct columns are sampled; each point is a
/// random combination of them under `law`. Library columns are used as-is, so
/// the bases are generally not orthonormal.
pub fn generate_from_library(
    library: &DataMatrix,
    num_subspaces: usize,
    basis_per_subspace: usize,
    points_per_subspace: usize,
    law: CoefficientLaw,
    seed: u64,
) -> Result<LibraryUnion> {
    if num_subspaces == 0 || basis_per_subspace == 0 || points_per_subspace == 0 {
        return Err(Error::InvalidSpec(
            "library union needs positive counts for subspaces, bases and points".into(),
        ));
    }
    if basis_per_subspace > library.num_samples() {
        return Err(Error::InvalidSpec(format!(
            "cannot select {} bases from a library of {} columns",
            basis_per_subspace,
            library.num_samples()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_ambient = library.ambient_dim();
    let n_total = num_subspaces * points_per_subspace;
    let mut matrix = Array2::<f64>::zeros((d_ambient, n_total));
    let mut labels = Vec::with_capacity(n_total);
    let mut selected = Vec::with_capacity(num_subspaces);
    let mut col = 0usize;
    for l in 0..num_subspaces {
        let mut picks: Vec<usize> =
            rand::seq::index::sample(&mut rng, library.num_samples(), basis_per_subspace).into_vec();
        picks.sort_unstable();
        for _ in 0..points_per_subspace {
            let coeff = draw_coefficients(law, basis_per_subspace, &mut rng);
            for r in 0..d_ambient {
                let mut acc = 0.0;
                for (j, &lib_col) in picks.iter().enumerate() {
                    acc += library.values()[[r, lib_col]] * coeff[j];
                }
                matrix[[r, col]] = acc;
            }
            labels.push((l + 1) as u32);
            col += 1;
        }
        selected.push(picks);
    }
    Ok(LibraryUnion {
        matrix: DataMatrix::new(matrix)?,
        labels: LabelVector::new(labels)?,
        selected,
    })
}
