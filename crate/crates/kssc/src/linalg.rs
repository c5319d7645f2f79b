//! Small dense/iterative linear-algebra kernels used across the crate:
//! symmetric eigendecomposition (Householder tridiagonalization + implicit-shift
//! QL), modified Gram-Schmidt orthonormalization, and a Lanczos routine with
//! full reorthogonalization for the smallest eigenpairs of a large symmetric
//! operator.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Maximum QL sweeps per eigenvalue before giving up.
const MAX_QL_ITERS: usize = 100;

/// Symmetric linear operator exposed through matrix-vector products only.
pub trait SymOp {
    fn dim(&self) -> usize;
    /// out = A * x
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. The input is symmetrized as `(A + A^T)/2` before
/// factorization, so tiny asymmetries from accumulated rounding are harmless.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::DegenerateInput("empty matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput(
            "matrix contains non-finite entries".into(),
        ));
    }

    let mut v = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            v[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]]);
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((Array1::from(d), v))
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Array1<f64>> {
    symmetric_eigen(a).map(|(vals, _)| vals)
}

/// Householder reduction of `v` to tridiagonal form; on exit `v` holds the
/// accumulated orthogonal transformation, `d` the diagonal and `e` the
/// subdiagonal. Ported from the classic EISPACK/JAMA routine.
fn tred2(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
                v[[j, i]] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                let f = d[j];
                v[[j, i]] = f;
                let mut g = e[j] + v[[j, j]] * f;
                for k in (j + 1)..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[[k, j]] -= f * e[k] + g * d[k];
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    v[[k, j]] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = 0.0;
    }
    v[[n - 1, n - 1]] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on the tridiagonal matrix produced by `tred2`,
/// accumulating eigenvectors into `v` and sorting eigenvalues ascending.
fn tql2(v: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::Eigen(format!(
                        "QL sweep exceeded {MAX_QL_ITERS} iterations at index {l}"
                    )));
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[[k, i + 1]];
                        v[[k, i + 1]] = s * v[[k, i]] + c * h;
                        v[[k, i]] = c * v[[k, i]] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort into ascending order, moving eigenvectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for r in 0..n {
                let tmp = v[[r, i]];
                v[[r, i]] = v[[r, k]];
                v[[r, k]] = tmp;
            }
        }
    }
    Ok(())
}

/// Orthonormalizes the columns of `g` in place by modified Gram-Schmidt with a
/// second sweep for re-orthogonalization. Fails if a column collapses to
/// numerical zero, which signals linearly dependent inputs.
pub fn orthonormalize_columns(g: &mut Array2<f64>) -> Result<()> {
    let (rows, cols) = g.dim();
    if cols > rows {
        return Err(Error::InvalidSpec(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    for j in 0..cols {
        for _sweep in 0..2 {
            for i in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += g[[r, i]] * g[[r, j]];
                }
                for r in 0..rows {
                    g[[r, j]] -= dot * g[[r, i]];
                }
            }
        }
        let norm = column_norm(g, j);
        if norm < 1e-12 {
            return Err(Error::DegenerateInput(format!(
                "column {j} became numerically zero during orthonormalization"
            )));
        }
        for r in 0..rows {
            g[[r, j]] /= norm;
        }
    }
    Ok(())
}

fn column_norm(g: &Array2<f64>, j: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..g.nrows() {
        s += g[[r, j]] * g[[r, j]];
    }
    s.sqrt()
}

/// Euclidean norm of a slice.
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean norm of an ndarray view.
pub fn view_norm2(x: ArrayView1<'_, f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smallest `p` eigenpairs of a symmetric operator.
///
/// Eigenpairs are computed one at a time with explicitly restarted Lanczos and
/// full reorthogonalization; each converged pair is locked and deflated out of
/// later sweeps. Deflation is what makes tightly clustered or repeated small
/// eigenvalues reliable: a single Krylov sequence can carry at most one copy of
/// a (near-)degenerate eigenvalue, while the deflated operator exposes the next
/// copy as an isolated extremal eigenvalue. Returns values in ascending order
/// with matching orthonormal eigenvector columns. Deterministic for a fixed
/// `seed`.
pub fn lanczos_smallest(
    op: &dyn SymOp,
    p: usize,
    tol: f64,
    seed: u64,
) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = op.dim();
    if p == 0 || p > n {
        return Err(Error::InvalidSpec(format!(
            "requested {p} eigenpairs from an operator of dimension {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut locked_vals: Vec<f64> = Vec::with_capacity(p);
    // Largest ||A q|| seen across all sweeps; used to make tolerances relative
    // to the operator's scale.
    let mut scale = 1.0f64;
    let mut warm: Option<Vec<f64>> = None;

    while locked.len() < p {
        let found = smallest_deflated(op, &locked, warm.take(), tol, &mut rng, &mut scale)?;
        locked_vals.push(found.value);
        locked.push(found.vector);
        warm = found.next_start;
    }

    // Deflation yields the values in ascending order up to the convergence
    // tolerance; sort to make the ordering exact.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| locked_vals[a].partial_cmp(&locked_vals[b]).unwrap());
    let mut vals = Array1::<f64>::zeros(p);
    let mut vecs = Array2::<f64>::zeros((n, p));
    for (slot, &idx) in order.iter().enumerate() {
        vals[slot] = locked_vals[idx];
        for i in 0..n {
            vecs[[i, slot]] = locked[idx][i];
        }
    }
    Ok((vals, vecs))
}

struct DeflatedPair {
    value: f64,
    vector: Vec<f64>,
    /// Second Ritz vector of the converged sweep — a good warm start for the
    /// next eigenpair.
    next_start: Option<Vec<f64>>,
}

/// One converged eigenpair of `op` restricted to the orthogonal complement of
/// `locked`. Runs Lanczos sweeps of bounded length, restarting each sweep from
/// the best Ritz vector of the previous one until the smallest Ritz pair's
/// residual drops below `tol * scale`.
fn smallest_deflated(
    op: &dyn SymOp,
    locked: &[Vec<f64>],
    warm: Option<Vec<f64>>,
    tol: f64,
    rng: &mut ChaCha8Rng,
    scale: &mut f64,
) -> Result<DeflatedPair> {
    let n = op.dim();
    let free = n - locked.len();
    let max_m = free.min(80);
    const MAX_SWEEPS: usize = 500;

    let mut start = warm.unwrap_or_else(|| random_unit(rng, n));
    for _sweep in 0..MAX_SWEEPS {
        purge(&mut start, locked, &[]);
        let nrm = norm2(&start);
        if nrm < 1e-8 {
            // Warm start collapsed into the locked span; draw a fresh one.
            start = random_unit(rng, n);
            continue;
        }
        for v in start.iter_mut() {
            *v /= nrm;
        }

        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut q = start.clone();
        let mut work = vec![0.0; n];

        loop {
            op.apply(&q, &mut work);
            *scale = scale.max(norm2(&work));
            let mut alpha = 0.0;
            for i in 0..n {
                alpha += work[i] * q[i];
            }
            alphas.push(alpha);
            purge(&mut work, locked, &basis);
            let beta = norm2(&work);

            let m = basis.len();
            let t = tridiagonal(&alphas, &betas);
            let (theta, s) = symmetric_eigen(&t)?;
            let resid = beta * s[[m - 1, 0]].abs();
            let floor = scale.max(1.0);
            // beta ~ 0 means the Krylov space is invariant, so the Ritz pair
            // is exact within this deflated subspace.
            let converged = resid <= tol * floor || beta <= 1e-13 * floor || m == free;
            if converged {
                let mut y = combine(&basis, &s, 0);
                purge(&mut y, locked, &[]);
                let ynrm = norm2(&y);
                if ynrm < 1e-8 {
                    return Err(Error::Eigen(
                        "converged Ritz vector collapsed under deflation".into(),
                    ));
                }
                for v in y.iter_mut() {
                    *v /= ynrm;
                }
                let next_start = if m >= 2 { Some(combine(&basis, &s, 1)) } else { None };
                return Ok(DeflatedPair {
                    value: theta[0],
                    vector: y,
                    next_start,
                });
            }
            if m >= max_m {
                // Restart from the current best Ritz vector.
                start = combine(&basis, &s, 0);
                break;
            }
            betas.push(beta);
            for (v, w) in q.iter_mut().zip(work.iter()) {
                *v = w / beta;
            }
            basis.push(q.clone());
        }
    }
    Err(Error::Eigen(format!(
        "Lanczos failed to converge an eigenpair within {MAX_SWEEPS} sweeps"
    )))
}

/// Subtract from `x` its projections onto every vector in `locked` and `basis`
/// (two Gram-Schmidt passes, so the result is orthogonal to machine precision).
fn purge(x: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in locked.iter().chain(basis.iter()) {
            let mut dot = 0.0;
            for i in 0..x.len() {
                dot += x[i] * b[i];
            }
            for i in 0..x.len() {
                x[i] -= dot * b[i];
            }
        }
    }
}

/// Ritz vector `j` of the current sweep: sum of basis vectors weighted by the
/// tridiagonal eigenvector matrix column `j`.
fn combine(basis: &[Vec<f64>], s: &Array2<f64>, j: usize) -> Vec<f64> {
    let n = basis[0].len();
    let mut y = vec![0.0; n];
    for (step, b) in basis.iter().enumerate() {
        let w = s[[step, j]];
        for i in 0..n {
            y[i] += w * b[i];
        }
    }
    y
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = norm2(&v);
        if nrm > 1e-6 {
            return v.iter().map(|x| x / nrm).collect();
        }
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> Array2<f64> {
    let m = alphas.len();
    let mut t = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        t[[i, i]] = alphas[i];
        if i + 1 < m {
            t[[i, i + 1]] = betas[i];
            t[[i + 1, i]] = betas[i];
        }
    }
    t
}
