//! Dense self-expression solvers that use every other column as the
//! dictionary, with the diagonal pinned to zero. These are the classic
//! full-dictionary formulations the neighbour-restricted solvers are measured
//! against; their workspace grows quadratically with N, so both entry points
//! first check the predicted resident memory against the configured budget.

use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::metrics::{cost_model, CostModelInput, Method};
use crate::solver::{
    frobenius_view, shrink, LambdaRule, SolverConfig, SparseCoefficients, SparseEntry, Variant,
};

/// Dense N x N coefficient matrix with an exactly zero diagonal.
#[derive(Clone, Debug)]
pub struct DenseCoefficients {
    values: Array2<f64>,
}

impl DenseCoefficients {
    /// Wraps a square coefficient matrix; entries must be finite and the
    /// diagonal exactly zero (no self-expression through the point itself).
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let n = values.nrows();
        if n == 0 || n != values.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrix must be square and nonempty, got {}×{}",
                values.nrows(),
                values.ncols()
            )));
        }
        for i in 0..n {
            if values[[i, i]] != 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "coefficient diagonal must be zero, found {} at {i}",
                    values[[i, i]]
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(
                "coefficient matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn num_samples(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    /// Converts to the column-sparse representation, dropping zeros.
    pub fn to_sparse(&self) -> Result<SparseCoefficients> {
        let n = self.num_samples();
        let mut columns = Vec::with_capacity(n);
        for c in 0..n {
            let mut col = Vec::new();
            for r in 0..n {
                let v = self.values[[r, c]];
                if v != 0.0 && r != c {
                    col.push(SparseEntry { row: r, value: v });
                }
            }
            columns.push(col);
        }
        SparseCoefficients::from_columns(n, columns)
    }
}

/// Outcome of a dense solve.
#[derive(Clone, Debug, Serialize)]
pub struct DenseReport {
    pub variant: Variant,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    /// Relaxed: `||X - X Z||_F`. Exact: `||X Z - X + E||_F / ||X||_F`.
    pub residual: f64,
    pub q: Option<f64>,
    /// Resolved per-column sparsity weights.
    pub lambdas: Vec<f64>,
    pub rho: f64,
    /// Per-iteration FLOPs under the crate's counting convention.
    pub flops_per_iteration: u64,
    pub wall_seconds: f64,
    pub objective_trace: Vec<f64>,
}

fn check_budget(method: Method, n: usize, d: usize, cfg: &SolverConfig) -> Result<()> {
    let estimate = cost_model(&CostModelInput {
        method,
        num_samples: n,
        ambient_dim: d,
        neighbors: None,
    })?;
    let required = estimate.bytes_resident();
    if required > cfg.memory_budget_bytes {
        return Err(Error::MemoryBudget {
            required,
            budget: cfg.memory_budget_bytes,
        });
    }
    Ok(())
}

/// Per-column weights against the full dictionary (all columns but the own
/// one).
fn resolve_lambdas(x: &DataMatrix, rule: LambdaRule) -> Vec<f64> {
    let n = x.num_samples();
    match rule {
        LambdaRule::Fixed { value } => vec![value; n],
        LambdaRule::Scaled { scale } => {
            let values = x.values();
            let d = x.ambient_dim();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut max_corr = 0.0f64;
                    for j in 0..n {
                        if j == i {
                            continue;
                        }
                        let mut acc = 0.0;
                        for r in 0..d {
                            acc += values[[r, j]] * values[[r, i]];
                        }
                        max_corr = max_corr.max(acc.abs());
                    }
                    scale * max_corr
                })
                .collect()
        }
    }
}

fn l1_weighted(z: &Array2<f64>, lambdas: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (c, &lam) in lambdas.iter().enumerate() {
        let mut col = 0.0;
        for r in 0..z.nrows() {
            col += z[[r, c]].abs();
        }
        acc += lam * col;
    }
    acc
}

fn shrink_columns_into(source: &Array2<f64>, grad: &Array2<f64>, rho: f64, lambdas: &[f64], out: &mut Array2<f64>) {
    let n = source.nrows();
    for c in 0..n {
        let tau = lambdas[c] / rho;
        for r in 0..n {
            out[[r, c]] = if r == c {
                0.0
            } else {
                shrink(source[[r, c]] - grad[[r, c]] / rho, tau)
            };
        }
    }
}

/// Dense relaxed solve:
/// `min_Z sum_i lambda_i ||z_i||_1 + 1/2 ||X - X Z||_F^2`, `diag(Z) = 0`,
/// by monotone accelerated proximal gradient with backtracking.
pub fn ssc_relaxed(x: &DataMatrix, cfg: &SolverConfig) -> Result<(DenseCoefficients, DenseReport)> {
    cfg.validate()?;
    let n = x.num_samples();
    let d = x.ambient_dim();
    if n < 2 {
        return Err(Error::DegenerateInput(
            "dense self-expression needs at least two columns".into(),
        ));
    }
    check_budget(Method::SscRelaxed, n, d, cfg)?;
    let start = Instant::now();

    let lambdas = resolve_lambdas(x, cfg.lambda);
    let xv = x.values();
    let frob_sq: f64 = xv.iter().map(|v| v * v).sum();
    let mut rho = cfg.rho0.unwrap_or(frob_sq);

    let mut z = Array2::<f64>::zeros((n, n));
    let mut point = z.clone();
    let mut cand = Array2::<f64>::zeros((n, n));
    let mut alpha = 1.0f64;
    let mut objective = 0.5 * frob_sq;
    let mut trace = vec![objective];
    let mut converged = false;
    let mut iterations = 0usize;

    for iter in 1..=cfg.max_iters {
        iterations = iter;

        let xp = xv.dot(&point); // D x N
        let mut r_point = xv.to_owned();
        r_point -= &xp;
        let f_point = 0.5 * r_point.iter().map(|v| v * v).sum::<f64>();
        let grad = {
            let mut g = xv.t().dot(&r_point); // N x N
            g.mapv_inplace(|v| -v);
            g
        };

        let mut f_cand;
        loop {
            shrink_columns_into(&point, &grad, rho, &lambdas, &mut cand);
            let xc = xv.dot(&cand);
            let mut acc = 0.0;
            for (a, b) in xv.iter().zip(xc.iter()) {
                let diff = a - b;
                acc += diff * diff;
            }
            f_cand = 0.5 * acc;
            let mut linear = 0.0;
            let mut sq = 0.0;
            for (c, p) in cand.iter().zip(point.iter()) {
                let diff = c - p;
                sq += diff * diff;
            }
            for (g, (c, p)) in grad.iter().zip(cand.iter().zip(point.iter())) {
                linear += g * (c - p);
            }
            let model = f_point + linear + 0.5 * rho * sq;
            if f_cand <= model + 1e-12 * f_cand.abs().max(1.0) {
                break;
            }
            rho *= cfg.backtrack_growth;
            if !rho.is_finite() || rho > 1e300 {
                return Err(Error::Divergence(
                    "line search exhausted the descent parameter range".into(),
                ));
            }
        }

        let objective_cand = l1_weighted(&cand, &lambdas) + f_cand;
        if !objective_cand.is_finite() {
            return Err(Error::Divergence("objective became non-finite".into()));
        }

        let accept = objective_cand <= objective;
        let alpha_new = 0.5 * (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt());
        let w_cand = alpha / alpha_new;
        let w_prev = (alpha - 1.0) / alpha_new;
        let objective_before = objective;

        if accept {
            for (p, (&c, &zv)) in point.iter_mut().zip(cand.iter().zip(z.iter())) {
                *p = c + w_prev * (c - zv);
            }
            z.assign(&cand);
            objective = objective_cand;
        } else {
            for (p, (&c, &zv)) in point.iter_mut().zip(cand.iter().zip(z.iter())) {
                *p = zv + w_cand * (c - zv);
            }
        }
        alpha = alpha_new;
        trace.push(objective);

        let change = (objective_before - objective_cand).abs();
        if change <= cfg.tol * objective_before.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let xr = xv.dot(&z);
    let mut resid_sq = 0.0;
    for (a, b) in xv.iter().zip(xr.iter()) {
        let diff = a - b;
        resid_sq += diff * diff;
    }

    let nn = n as u64;
    let dd = d as u64;
    let report = DenseReport {
        variant: Variant::Relaxed,
        iterations,
        converged,
        objective,
        residual: resid_sq.sqrt(),
        q: None,
        lambdas,
        rho,
        flops_per_iteration: 6 * nn * nn + 4 * dd * nn * nn + dd * nn,
        wall_seconds: start.elapsed().as_secs_f64(),
        objective_trace: trace,
    };
    Ok((DenseCoefficients { values: z }, report))
}

/// Dense exact solve:
/// `min_{Z,E} sum_i lambda_i ||z_i||_1 + 1/2 ||E||_F^2` subject to
/// `X = X Z + E`, `diag(Z) = 0`, by the linearized alternating-direction
/// scheme with parallel splitting.
pub fn ssc_exact(x: &DataMatrix, cfg: &SolverConfig) -> Result<(DenseCoefficients, DenseReport)> {
    cfg.validate()?;
    let n = x.num_samples();
    let d = x.ambient_dim();
    if n < 2 {
        return Err(Error::DegenerateInput(
            "dense self-expression needs at least two columns".into(),
        ));
    }
    check_budget(Method::SscExact, n, d, cfg)?;
    let start = Instant::now();

    let lambdas = resolve_lambdas(x, cfg.lambda);
    let xv = x.values();
    let frob = frobenius_view(xv.view());
    let rho = cfg.rho0.unwrap_or(frob);
    let mut mu = cfg.mu0;

    let mut z = Array2::<f64>::zeros((n, n));
    let mut e = Array2::<f64>::zeros((d, n));
    let mut y = Array2::<f64>::zeros((d, n));
    let mut xz = Array2::<f64>::zeros((d, n));
    let mut z_new = Array2::<f64>::zeros((n, n));

    let objective_of = |z: &Array2<f64>, e: &Array2<f64>| -> f64 {
        l1_weighted(z, &lambdas) + 0.5 * e.iter().map(|v| v * v).sum::<f64>()
    };

    let mut trace = vec![objective_of(&z, &e)];
    let mut converged = false;
    let mut iterations = 0usize;
    let mut last_residual = f64::INFINITY;
    let mut last_q = f64::INFINITY;

    for iter in 1..=cfg.max_iters {
        iterations = iter;

        // V = X Z - (X - E - Y / mu); G = mu X^T V
        let mut v = xz.clone();
        for ((vv, &xval), (&ev, &yv)) in v.iter_mut().zip(xv.iter()).zip(e.iter().zip(y.iter())) {
            *vv -= xval - ev - yv / mu;
        }
        let grad = {
            let mut g = xv.t().dot(&v);
            g.mapv_inplace(|val| mu * val);
            g
        };
        shrink_columns_into(&z, &grad, rho, &lambdas, &mut z_new);

        // E update from the previous coefficients
        let factor = mu / (1.0 + mu);
        let mut e_new = Array2::<f64>::zeros((d, n));
        for ((en, &xval), (&xzv, &yv)) in e_new.iter_mut().zip(xv.iter()).zip(xz.iter().zip(y.iter())) {
            *en = factor * (xval - xzv - yv / mu);
        }

        let mut dz = 0.0;
        for (&a, &b) in z_new.iter().zip(z.iter()) {
            let diff = a - b;
            dz += diff * diff;
        }
        let mut de = 0.0;
        for (&a, &b) in e_new.iter().zip(e.iter()) {
            let diff = a - b;
            de += diff * diff;
        }
        let q = mu * rho.sqrt() / frob * dz.sqrt().max(de.sqrt());

        let xz_new = xv.dot(&z_new);
        let mut resid_sq = 0.0;
        for ((&xzv, &xval), (&ev, yv)) in xz_new.iter().zip(xv.iter()).zip(e_new.iter().zip(y.iter_mut())) {
            let rv = xzv - xval + ev;
            resid_sq += rv * rv;
            *yv += mu * rv;
        }
        let residual = resid_sq.sqrt() / frob;

        let stop = residual < cfg.eps_residual && q < cfg.eps_change;
        if q < cfg.eps_change {
            mu = (mu * cfg.mu_growth).min(cfg.mu_max);
        }

        std::mem::swap(&mut z, &mut z_new);
        e = e_new;
        xz = xz_new;
        last_residual = residual;
        last_q = q;

        let objective = objective_of(&z, &e);
        if !objective.is_finite() {
            return Err(Error::Divergence("objective became non-finite".into()));
        }
        trace.push(objective);

        if stop {
            converged = true;
            break;
        }
    }

    let nn = n as u64;
    let dd = d as u64;
    let report = DenseReport {
        variant: Variant::Exact,
        iterations,
        converged,
        objective: *trace.last().expect("trace non-empty"),
        residual: last_residual,
        q: Some(last_q),
        lambdas,
        rho,
        flops_per_iteration: 7 * nn * nn + 4 * dd * nn * nn + 4 * dd * nn,
        wall_seconds: start.elapsed().as_secs_f64(),
        objective_trace: trace,
    };
    Ok((DenseCoefficients { values: z }, report))
}
