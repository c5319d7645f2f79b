//! Quality metrics (clustering error, PSNR) and the arithmetic cost model
//! that predicts per-iteration work and resident memory for each solver.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::LabelVector;
use crate::error::{Error, Result};

/// Subspace clustering error in percent: the fraction of misclassified points
/// under the best one-to-one matching between predicted and true cluster ids.
///
/// The two labelings may use different id sets and different numbers of
/// clusters; the confusion matrix is padded square and matched optimally, so a
/// permuted but otherwise perfect labeling scores exactly 0.
pub fn sce(predicted: &LabelVector, truth: &LabelVector) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "predicted has {} labels, truth has {}",
            predicted.len(),
            truth.len()
        )));
    }
    let n = predicted.len();
    let pred_ids = predicted.distinct();
    let true_ids = truth.distinct();
    let index_of = |ids: &[u32], id: u32| ids.binary_search(&id).expect("id present");

    let side = pred_ids.len().max(true_ids.len());
    let mut agreement = Array2::<f64>::zeros((side, side));
    for (&p, &t) in predicted.as_slice().iter().zip(truth.as_slice()) {
        agreement[[index_of(&pred_ids, p), index_of(&true_ids, t)]] += 1.0;
    }

    // Hungarian minimizes, so negate the agreement counts.
    let cost = agreement.mapv(|v| -v);
    let assignment = hungarian_min(&cost);
    let mut matched = 0.0;
    for (row, &col) in assignment.iter().enumerate() {
        matched += agreement[[row, col]];
    }
    Ok(100.0 * (n as f64 - matched) / n as f64)
}

/// Minimum-cost assignment on a square cost matrix, returned as the column
/// chosen for each row. Shortest-augmenting-path formulation with potentials,
/// O(n^3) overall.
pub fn hungarian_min(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "cost matrix must be square");
    if n == 0 {
        return Vec::new();
    }

    // 1-based working arrays; index 0 is the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[row_of_col[j] - 1] = j - 1;
    }
    assignment
}

/// Peak signal-to-noise ratio in dB between `a` and `reference`, with `peak`
/// the signal's peak value. Identical inputs return positive infinity.
pub fn psnr(a: &Array2<f64>, reference: &Array2<f64>, peak: f64) -> Result<f64> {
    if a.dim() != reference.dim() {
        return Err(Error::ShapeMismatch(format!(
            "PSNR inputs differ in shape: {:?} vs {:?}",
            a.dim(),
            reference.dim()
        )));
    }
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "peak must be positive and finite, got {peak}"
        )));
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::DegenerateInput("empty matrices".into()));
    }
    let mut sq = 0.0;
    for (x, y) in a.iter().zip(reference.iter()) {
        let d = x - y;
        sq += d * d;
    }
    let mse = sq / n as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Which coefficient solver a cost estimate or experiment run refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    KsscRelaxed,
    KsscExact,
    SscRelaxed,
    SscExact,
}

impl Method {
    pub fn is_kssc(self) -> bool {
        matches!(self, Method::KsscRelaxed | Method::KsscExact)
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Method::KsscExact | Method::SscExact)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::KsscRelaxed => "kssc_relaxed",
            Method::KsscExact => "kssc_exact",
            Method::SscRelaxed => "ssc_relaxed",
            Method::SscExact => "ssc_exact",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kssc_relaxed" => Ok(Method::KsscRelaxed),
            "kssc_exact" => Ok(Method::KsscExact),
            "ssc_relaxed" => Ok(Method::SscRelaxed),
            "ssc_exact" => Ok(Method::SscExact),
            other => Err(Error::InvalidSpec(format!(
                "unknown method '{other}'; expected kssc_relaxed, kssc_exact, ssc_relaxed or ssc_exact"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Problem sizes for a [`cost_model`] query.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CostModelInput {
    pub method: Method,
    /// Number of sample points N.
    pub num_samples: usize,
    /// Ambient dimension D.
    pub ambient_dim: usize,
    /// Neighbourhood size k; required for the kSSC methods, ignored otherwise.
    pub neighbors: Option<usize>,
}

/// Predicted per-iteration floating-point operations and resident floats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub flops_per_iteration: u64,
    pub floats_resident: u64,
}

impl CostEstimate {
    /// Resident workspace in bytes at eight bytes per float.
    pub fn bytes_resident(&self) -> u64 {
        self.floats_resident * 8
    }
}

/// Per-iteration cost of each solver, counting one multiply-add as two FLOPs.
///
/// FLOP totals cover one pass over all N columns. The dominant terms are the
/// two matrix products per iteration (`4DN^2` dense, `4kDN` restricted to k
/// neighbours); the remaining terms are the elementwise coefficient updates
/// (6 operations per entry for the relaxed solver, 7 for the exact one) and
/// the `D`-sized residual assembly (one operation per entry relaxed, four
/// exact, which also carries the error variable). Resident floats count the
/// coefficient-sized iterate, gradient and momentum buffers, plus the error
/// matrix for the exact variants.
pub fn cost_model(input: &CostModelInput) -> Result<CostEstimate> {
    let n = input.num_samples as u64;
    let d = input.ambient_dim as u64;
    if n == 0 || d == 0 {
        return Err(Error::InvalidSpec(
            "cost model needs positive num_samples and ambient_dim".into(),
        ));
    }
    let estimate = if input.method.is_kssc() {
        let k = input.neighbors.ok_or_else(|| {
            Error::InvalidSpec("kSSC cost model needs a neighbour count k".into())
        })? as u64;
        if k == 0 || k >= n {
            return Err(Error::InvalidSpec(format!(
                "neighbour count must satisfy 1 <= k <= N-1, got k={k}, N={n}"
            )));
        }
        match input.method {
            Method::KsscRelaxed => CostEstimate {
                flops_per_iteration: 6 * k * n + 4 * k * d * n + d * n,
                floats_resident: 4 * k * n,
            },
            Method::KsscExact => CostEstimate {
                flops_per_iteration: 7 * k * n + 4 * k * d * n + 4 * d * n,
                floats_resident: 2 * k * n + d * n,
            },
            _ => unreachable!(),
        }
    } else {
        match input.method {
            Method::SscRelaxed => CostEstimate {
                flops_per_iteration: 6 * n * n + 4 * d * n * n + d * n,
                floats_resident: 4 * n * n,
            },
            Method::SscExact => CostEstimate {
                flops_per_iteration: 7 * n * n + 4 * d * n * n + 4 * d * n,
                floats_resident: 2 * n * n + d * n,
            },
            _ => unreachable!(),
        }
    };
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    fn labels(v: &[u32]) -> LabelVector {
        LabelVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn perfect_relabeling_scores_zero() {
        let truth = labels(&[1, 1, 2, 2, 3, 3]);
        let pred = labels(&[3, 3, 1, 1, 2, 2]);
        assert_abs_diff_eq!(sce(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn single_cluster_on_both_sides_scores_zero() {
        let truth = labels(&[1, 1, 1]);
        let pred = labels(&[7, 7, 7]);
        assert_abs_diff_eq!(sce(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn known_confusion_small_case() {
        // best matching recovers 4 of 6 points
        let pred = labels(&[1, 1, 2, 2, 3, 3]);
        let truth = labels(&[2, 2, 1, 1, 1, 1]);
        assert_abs_diff_eq!(sce(&pred, &truth).unwrap(), 100.0 * 2.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn differing_cluster_counts_are_padded() {
        let pred = labels(&[1, 1, 1, 1]);
        let truth = labels(&[1, 1, 2, 2]);
        // one true cluster is necessarily lost
        assert_abs_diff_eq!(sce(&pred, &truth).unwrap(), 50.0, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_lengths_error() {
        let a = labels(&[1, 2]);
        let b = labels(&[1, 2, 3]);
        assert!(sce(&a, &b).is_err());
    }

    #[test]
    fn hungarian_matches_exhaustive_search() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for n in 1..=6usize {
            for _ in 0..20 {
                let mut cost = Array2::<f64>::zeros((n, n));
                for v in cost.iter_mut() {
                    *v = rng.random::<f64>() * 10.0 - 5.0;
                }
                let assignment = hungarian_min(&cost);
                let total: f64 = assignment
                    .iter()
                    .enumerate()
                    .map(|(r, &c)| cost[[r, c]])
                    .sum();
                let best = brute_force_min(&cost);
                assert_abs_diff_eq!(total, best, epsilon = 1e-9);
                // valid permutation
                let mut seen = vec![false; n];
                for &c in &assignment {
                    assert!(!seen[c]);
                    seen[c] = true;
                }
            }
        }
    }

    fn brute_force_min(cost: &Array2<f64>) -> f64 {
        fn rec(cost: &Array2<f64>, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            let n = cost.nrows();
            if row == n {
                if acc < *best {
                    *best = acc;
                }
                return;
            }
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    rec(cost, row + 1, used, acc + cost[[row, c]], best);
                    used[c] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(cost, 0, &mut vec![false; cost.nrows()], 0.0, &mut best);
        best
    }

    #[test]
    fn psnr_of_identical_matrices_is_infinite() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(psnr(&a, &a, 4.0).unwrap().is_infinite());
    }

    #[test]
    fn psnr_known_value() {
        let reference = array![[1.0, 2.0], [0.5, 2.0]];
        let shifted = reference.mapv(|v| v + 0.1);
        // mse = 0.01, peak = 2 -> 10*log10(400)
        assert_abs_diff_eq!(
            psnr(&shifted, &reference, 2.0).unwrap(),
            10.0 * 400.0f64.log10(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn psnr_rejects_bad_peak_and_shapes() {
        let a = array![[1.0, 2.0]];
        let b = array![[1.0], [2.0]];
        assert!(psnr(&a, &a, 0.0).is_err());
        assert!(psnr(&a, &b, 1.0).is_err());
    }

    #[test]
    fn cost_model_reference_values() {
        let kssc = cost_model(&CostModelInput {
            method: Method::KsscRelaxed,
            num_samples: 1000,
            ambient_dim: 500,
            neighbors: Some(10),
        })
        .unwrap();
        assert_eq!(kssc.flops_per_iteration, 20_560_000);
        assert_eq!(kssc.floats_resident, 40_000);

        let ssc = cost_model(&CostModelInput {
            method: Method::SscRelaxed,
            num_samples: 1000,
            ambient_dim: 500,
            neighbors: None,
        })
        .unwrap();
        assert_eq!(ssc.flops_per_iteration, 2_006_500_000);
        assert_eq!(ssc.floats_resident, 4_000_000);

        let exact = cost_model(&CostModelInput {
            method: Method::SscExact,
            num_samples: 100,
            ambient_dim: 30,
            neighbors: None,
        })
        .unwrap();
        assert_eq!(exact.flops_per_iteration, 7 * 10_000 + 4 * 30 * 10_000 + 4 * 3_000);
        assert_eq!(exact.floats_resident, 2 * 10_000 + 3_000);

        let kssc_exact = cost_model(&CostModelInput {
            method: Method::KsscExact,
            num_samples: 100,
            ambient_dim: 30,
            neighbors: Some(8),
        })
        .unwrap();
        assert_eq!(
            kssc_exact.flops_per_iteration,
            7 * 8 * 100 + 4 * 8 * 30 * 100 + 4 * 30 * 100
        );
        assert_eq!(kssc_exact.floats_resident, 2 * 8 * 100 + 30 * 100);
    }

    #[test]
    fn cost_model_validates_neighbours() {
        let mut input = CostModelInput {
            method: Method::KsscRelaxed,
            num_samples: 50,
            ambient_dim: 10,
            neighbors: None,
        };
        assert!(cost_model(&input).is_err());
        input.neighbors = Some(50);
        assert!(cost_model(&input).is_err());
        input.neighbors = Some(49);
        assert!(cost_model(&input).is_ok());
    }

    proptest! {
        #[test]
        fn sce_is_symmetric_and_bounded(
            seed in 0u64..5000,
            n in 2usize..40,
            p1 in 1u32..6,
            p2 in 1u32..6,
        ) {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = labels(&(0..n).map(|_| rng.random_range(1..=p1)).collect::<Vec<_>>());
            let b = labels(&(0..n).map(|_| rng.random_range(1..=p2)).collect::<Vec<_>>());
            let ab = sce(&a, &b).unwrap();
            let ba = sce(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!((0.0..=100.0).contains(&ab));
        }

        #[test]
        fn sce_ignores_relabeling(seed in 0u64..5000, n in 2usize..30) {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let truth = labels(&(0..n).map(|_| rng.random_range(1..=4u32)).collect::<Vec<_>>());
            let pred = labels(&(0..n).map(|_| rng.random_range(1..=4u32)).collect::<Vec<_>>());
            // relabel predictions through a fixed permutation of ids
            let perm = [3u32, 1, 4, 2];
            let renamed = labels(
                &pred
                    .as_slice()
                    .iter()
                    .map(|&l| perm[(l - 1) as usize])
                    .collect::<Vec<_>>(),
            );
            let direct = sce(&pred, &truth).unwrap();
            let via_perm = sce(&renamed, &truth).unwrap();
            prop_assert!((direct - via_perm).abs() < 1e-9);
        }
    }
}
