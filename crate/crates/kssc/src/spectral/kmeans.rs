//! Seeded k-means over row vectors: k-means++ initialization, Lloyd
//! refinement with empty-cluster repair, best-of-restarts selection.
//! Used to cluster the rows of a spectral embedding.

use ndarray::ArrayView2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_ITERS: usize = 100;

/// Outcome of a k-means run.
#[derive(Clone, Debug)]
pub struct KMeans {
    /// Cluster id in `0..k` for every row.
    pub labels: Vec<usize>,
    /// Sum of squared distances from each row to its cluster centre.
    pub inertia: f64,
    /// Number of restarts performed.
    pub restarts_used: usize,
    /// True when a cluster could not be kept non-empty (fewer distinct rows
    /// than requested clusters).
    pub degenerate: bool,
}

/// Clusters the rows of `data` into `k` groups. Runs `restarts` independent
/// k-means++ initializations from one seeded RNG stream and keeps the
/// assignment with the lowest inertia; ties keep the earliest restart, so the
/// result is a pure function of the inputs.
pub fn run_kmeans(data: ArrayView2<'_, f64>, k: usize, restarts: usize, seed: u64) -> KMeans {
    let n = data.nrows();
    let d = data.ncols();
    if n == 0 || k == 0 {
        return KMeans {
            labels: vec![0; n],
            inertia: 0.0,
            restarts_used: 0,
            degenerate: n > 0,
        };
    }
    let k = k.min(n);
    // Logical-order iteration gives a row-major copy for any input layout.
    let rows: Vec<f64> = data.iter().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let restarts = restarts.max(1);
    let mut best: Option<(Vec<usize>, f64, bool)> = None;
    for _ in 0..restarts {
        let run = lloyd(&rows, n, d, k, &mut rng);
        let better = match &best {
            None => true,
            Some((_, inertia, _)) => run.1 < *inertia,
        };
        if better {
            best = Some(run);
        }
    }
    let (labels, inertia, degenerate) = best.expect("at least one restart runs");
    KMeans {
        labels,
        inertia,
        restarts_used: restarts,
        degenerate,
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lloyd(rows: &[f64], n: usize, d: usize, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64, bool) {
    let row = |i: usize| &rows[i * d..(i + 1) * d];

    // k-means++ seeding: first centre uniform, the rest sampled with
    // probability proportional to squared distance from the chosen set.
    let mut centers = vec![0.0f64; k * d];
    let first = rng.random_range(0..n);
    centers[..d].copy_from_slice(row(first));
    let mut min_d2: Vec<f64> = (0..n).map(|i| sq_dist(row(i), &centers[..d])).collect();
    for c in 1..k {
        let total: f64 = min_d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers[c * d..(c + 1) * d].copy_from_slice(row(idx));
        for i in 0..n {
            let dist = sq_dist(row(i), &centers[c * d..(c + 1) * d]);
            if dist < min_d2[i] {
                min_d2[i] = dist;
            }
        }
    }

    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let mut counts = vec![0usize; k];
    let mut inertia = 0.0;
    let mut degenerate = false;
    for iter in 0..MAX_ITERS {
        // Assignment; ties go to the lowest cluster index.
        let mut changed = false;
        inertia = 0.0;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let dd = sq_dist(row(i), &centers[c * d..(c + 1) * d]);
                if dd < best_d {
                    best_d = dd;
                    best_c = c;
                }
            }
            dist[i] = best_d;
            inertia += best_d;
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }
        if iter > 0 && !changed {
            break;
        }

        // Update step.
        centers.fill(0.0);
        counts.fill(0);
        for i in 0..n {
            counts[labels[i]] += 1;
            for (cv, xv) in centers[labels[i] * d..(labels[i] + 1) * d]
                .iter_mut()
                .zip(row(i))
            {
                *cv += xv;
            }
        }
        degenerate = false;
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for cv in &mut centers[c * d..(c + 1) * d] {
                    *cv *= inv;
                }
                continue;
            }
            // Empty cluster: relocate its centre to the row farthest from its
            // current centre, if any row is strictly away from one.
            let (imax, dmax) = dist
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
                    if v > acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
            if dmax > 0.0 {
                centers[c * d..(c + 1) * d].copy_from_slice(row(imax));
                dist[imax] = 0.0;
            } else {
                degenerate = true;
            }
        }
    }

    counts.fill(0);
    for &l in &labels {
        counts[l] += 1;
    }
    if counts.iter().any(|&c| c == 0) {
        degenerate = true;
    }
    (labels, inertia, degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn blobs() -> Array2<f64> {
        // Three tight, well-separated 2-D groups of four points each.
        let mut data = Array2::zeros((12, 2));
        let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
        let jitter = [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)];
        for (g, &(cx, cy)) in centers.iter().enumerate() {
            for (j, &(dx, dy)) in jitter.iter().enumerate() {
                data[[4 * g + j, 0]] = cx + dx;
                data[[4 * g + j, 1]] = cy + dy;
            }
        }
        data
    }

    #[test]
    fn separated_blobs_are_recovered() {
        let data = blobs();
        let km = run_kmeans(data.view(), 3, 10, 7);
        assert!(!km.degenerate);
        assert_eq!(km.restarts_used, 10);
        for g in 0..3 {
            let first = km.labels[4 * g];
            for j in 1..4 {
                assert_eq!(km.labels[4 * g + j], first);
            }
        }
        let distinct: std::collections::HashSet<_> = km.labels.iter().collect();
        assert_eq!(distinct.len(), 3);
        // Four points at distance 0.1 from their centroid each contribute 0.01
        // minus the centroid shift; the blob inertia is small and positive.
        assert!(km.inertia < 0.2, "inertia {}", km.inertia);
    }

    #[test]
    fn same_seed_same_labels() {
        let data = blobs();
        let a = run_kmeans(data.view(), 3, 10, 42);
        let b = run_kmeans(data.view(), 3, 10, 42);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn single_cluster_inertia_is_scatter_around_mean() {
        let data = array![[0.0], [2.0], [4.0]];
        let km = run_kmeans(data.view(), 1, 3, 0);
        // Mean is 2; squared deviations 4 + 0 + 4.
        assert!((km.inertia - 8.0).abs() < 1e-12);
        assert_eq!(km.labels, vec![0, 0, 0]);
    }

    #[test]
    fn k_equal_n_distinct_points_gives_singletons() {
        let data = array![[0.0, 0.0], [5.0, 1.0], [-3.0, 2.0], [1.0, 8.0]];
        let km = run_kmeans(data.view(), 4, 10, 3);
        assert!(km.inertia.abs() < 1e-12);
        let distinct: std::collections::HashSet<_> = km.labels.iter().collect();
        assert_eq!(distinct.len(), 4);
        assert!(!km.degenerate);
    }

    #[test]
    fn duplicate_points_flag_degeneracy() {
        // Two distinct locations, three requested clusters.
        let data = array![[0.0], [0.0], [1.0], [1.0]];
        let km = run_kmeans(data.view(), 3, 5, 11);
        assert!(km.degenerate);
    }
}
