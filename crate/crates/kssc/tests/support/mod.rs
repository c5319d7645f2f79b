//! Shared helpers for the integration tests: an independent reference solver
//! for the l1-regularized least-squares problem and seeded random problem
//! generators. The reference solver is cyclic coordinate descent, a different
//! algorithm family from anything in the library, so agreement between the two
//! is meaningful evidence of correctness rather than a shared-bug echo.
#![allow(dead_code)]

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Scalar soft-threshold, written out locally so the reference path shares no
/// code with the library.
fn soft(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Reference minimizer of `lambda * ||z||_1 + 1/2 * ||x - A z||^2` by cyclic
/// coordinate descent iterated to a tight fixed point. Each coordinate update
/// solves its one-dimensional subproblem exactly, which guarantees convergence
/// to the global minimum of this convex objective for any dictionary.
pub fn lasso_oracle(x: ArrayView1<'_, f64>, a: ArrayView2<'_, f64>, lambda: f64) -> Array1<f64> {
    let d = a.nrows();
    let m = a.ncols();
    assert_eq!(x.len(), d, "column/dictionary shape mismatch");
    assert!(lambda > 0.0, "lambda must be positive");

    let col_sq: Vec<f64> = (0..m)
        .map(|j| (0..d).map(|r| a[[r, j]] * a[[r, j]]).sum())
        .collect();
    let mut z = Array1::<f64>::zeros(m);
    let mut residual: Array1<f64> = x.to_owned(); // r = x - A z

    for _sweep in 0..200_000 {
        let mut max_change = 0.0f64;
        for j in 0..m {
            if col_sq[j] == 0.0 {
                continue;
            }
            let old = z[j];
            let mut corr = 0.0;
            for r in 0..d {
                corr += a[[r, j]] * residual[r];
            }
            let new = soft(corr + col_sq[j] * old, lambda) / col_sq[j];
            if new != old {
                let delta = new - old;
                for r in 0..d {
                    residual[r] -= delta * a[[r, j]];
                }
                z[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < 1e-14 {
            break;
        }
    }
    z
}

/// Objective value `lambda * ||z||_1 + 1/2 * ||x - A z||^2`.
pub fn lasso_objective(
    x: ArrayView1<'_, f64>,
    a: ArrayView2<'_, f64>,
    lambda: f64,
    z: &Array1<f64>,
) -> f64 {
    let d = a.nrows();
    let m = a.ncols();
    let mut fit = 0.0;
    for r in 0..d {
        let mut dot = 0.0;
        for j in 0..m {
            dot += a[[r, j]] * z[j];
        }
        let diff = x[r] - dot;
        fit += diff * diff;
    }
    lambda * z.iter().map(|v| v.abs()).sum::<f64>() + 0.5 * fit
}

/// Optimal objective of the reference problem.
pub fn oracle_objective(x: ArrayView1<'_, f64>, a: ArrayView2<'_, f64>, lambda: f64) -> f64 {
    let z = lasso_oracle(x, a, lambda);
    lasso_objective(x, a, lambda, &z)
}

/// One random per-column problem: a Gaussian dictionary plus a target that
/// mixes a sparse combination of dictionary columns with ambient noise, so the
/// minimizer is neither trivially zero nor fully dense.
pub struct ColumnProblem {
    pub x: Array1<f64>,
    pub dict: Array2<f64>,
    pub lambda: f64,
}

pub fn random_column_problem(rng: &mut ChaCha8Rng, max_d: usize, max_m: usize) -> ColumnProblem {
    let d = rng.random_range(3..=max_d);
    let m = rng.random_range(2..=max_m);
    let mut dict = Array2::<f64>::zeros((d, m));
    for v in dict.iter_mut() {
        *v = rng.sample::<f64, _>(StandardNormal);
    }
    let mut x = Array1::<f64>::zeros(d);
    // sparse combination of a few columns ...
    let picks = rng.random_range(1..=m.min(3));
    for _ in 0..picks {
        let j = rng.random_range(0..m);
        let w: f64 = rng.sample::<f64, _>(StandardNormal);
        for r in 0..d {
            x[r] += w * dict[[r, j]];
        }
    }
    // ... plus a noise component so the fit cannot be made exact
    for v in x.iter_mut() {
        *v += 0.1 * rng.sample::<f64, _>(StandardNormal);
    }
    // lambda between 5% and 50% of the zeroing threshold ||A^T x||_inf
    let mut max_corr = 0.0f64;
    for j in 0..m {
        let mut acc = 0.0;
        for r in 0..d {
            acc += dict[[r, j]] * x[r];
        }
        max_corr = max_corr.max(acc.abs());
    }
    let lambda = max_corr.max(1e-6) * (0.05 + 0.45 * rng.random::<f64>());
    ColumnProblem { x, dict, lambda }
}

/// Relative difference `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
