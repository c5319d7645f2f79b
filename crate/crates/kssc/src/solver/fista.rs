//! Accelerated proximal-gradient solver for the relaxed per-column problem
//! `min_z lambda ||z||_1 + 1/2 ||x - X z||_2^2`.
//!
//! The step size comes from a backtracking line search on the quadratic
//! majorization; acceleration uses the usual momentum sequence
//! `alpha_{t+1} = (1 + sqrt(1 + 4 alpha_t^2)) / 2`. Acceptance is monotone:
//! when the accelerated candidate would increase the objective, the previous
//! iterate is kept and the momentum point is rebuilt around it, so the
//! objective trace never increases. Iteration stops when the relative
//! objective change drops below `tol`.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::solver::{
    gram_condition, relaxed_flops_per_iter, shrink, ColumnReport, SolverConfig,
};

/// Largest descent parameter the line search may reach before the solve is
/// declared divergent.
const RHO_CEILING: f64 = 1e300;

pub fn solve_column_relaxed(
    x: ArrayView1<'_, f64>,
    dict: ArrayView2<'_, f64>,
    cfg: &SolverConfig,
) -> Result<(Array1<f64>, ColumnReport)> {
    cfg.validate()?;
    let d = dict.nrows();
    let m = dict.ncols();
    if x.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "column has {} rows but dictionary has {d}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) || dict.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput(
            "solver inputs contain non-finite values".into(),
        ));
    }

    let lambda = cfg.lambda.resolve(x, dict);
    let flops = relaxed_flops_per_iter(d, m);

    if m == 0 {
        let objective = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        return Ok((
            Array1::zeros(0),
            ColumnReport {
                iterations: 0,
                converged: true,
                objective,
                residual: (2.0 * objective).sqrt(),
                q: None,
                lambda,
                rho: 0.0,
                gram_condition: 1.0,
                flops_per_iteration: flops,
                objective_trace: vec![objective],
            },
        ));
    }

    let cond = gram_condition(dict);
    let frob_sq: f64 = dict.iter().map(|v| v * v).sum();
    let mut rho = cfg.rho0.unwrap_or(frob_sq);
    if rho <= 0.0 {
        // all-zero dictionary: the zero solution is optimal
        rho = 1.0;
    }

    let f_of = |z: &Array1<f64>| -> f64 {
        let mut acc = 0.0;
        for r in 0..d {
            let mut dot = 0.0;
            for j in 0..m {
                dot += dict[[r, j]] * z[j];
            }
            let diff = x[r] - dot;
            acc += diff * diff;
        }
        0.5 * acc
    };
    let l1 = |z: &Array1<f64>| -> f64 { z.iter().map(|v| v.abs()).sum::<f64>() };

    let mut z = Array1::<f64>::zeros(m);
    let mut point = z.clone(); // momentum point
    let mut alpha = 1.0f64;
    let mut objective = f_of(&z);
    let mut trace = vec![objective];
    let mut converged = false;
    let mut iterations = 0usize;

    for iter in 1..=cfg.max_iters {
        iterations = iter;

        // gradient at the momentum point
        let mut residual_at_point = Array1::<f64>::zeros(d);
        for r in 0..d {
            let mut dot = 0.0;
            for j in 0..m {
                dot += dict[[r, j]] * point[j];
            }
            residual_at_point[r] = x[r] - dot;
        }
        let f_point = 0.5 * residual_at_point.iter().map(|v| v * v).sum::<f64>();
        let mut grad = Array1::<f64>::zeros(m);
        for j in 0..m {
            let mut dot = 0.0;
            for r in 0..d {
                dot += dict[[r, j]] * residual_at_point[r];
            }
            grad[j] = -dot;
        }

        // backtracking line search on the majorization
        let mut candidate;
        let mut f_candidate;
        loop {
            candidate = Array1::<f64>::zeros(m);
            for j in 0..m {
                candidate[j] = shrink(point[j] - grad[j] / rho, lambda / rho);
            }
            f_candidate = f_of(&candidate);
            let mut linear = 0.0;
            let mut sq = 0.0;
            for j in 0..m {
                let diff = candidate[j] - point[j];
                linear += grad[j] * diff;
                sq += diff * diff;
            }
            let model = f_point + linear + 0.5 * rho * sq;
            if f_candidate <= model + 1e-12 * f_candidate.abs().max(1.0) {
                break;
            }
            rho *= cfg.backtrack_growth;
            if !rho.is_finite() || rho > RHO_CEILING {
                return Err(Error::Divergence(
                    "line search exhausted the descent parameter range".into(),
                ));
            }
        }

        let objective_candidate = lambda * l1(&candidate) + f_candidate;
        if !objective_candidate.is_finite() {
            return Err(Error::Divergence("objective became non-finite".into()));
        }

        // monotone acceptance: keep the better of candidate and current
        // iterate, and rebuild the momentum point around whichever won
        let accept = objective_candidate <= objective;
        let alpha_new = 0.5 * (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt());
        let w_cand = alpha / alpha_new;
        let w_prev = (alpha - 1.0) / alpha_new;
        let objective_before = objective;

        if accept {
            for j in 0..m {
                point[j] = candidate[j] + w_prev * (candidate[j] - z[j]);
            }
            z = candidate;
            objective = objective_candidate;
        } else {
            for j in 0..m {
                point[j] = z[j] + w_cand * (candidate[j] - z[j]);
            }
        }
        alpha = alpha_new;
        trace.push(objective);

        let change = (objective_before - objective_candidate).abs();
        if change <= cfg.tol * objective_before.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let mut residual_sq = 0.0;
    for r in 0..d {
        let mut dot = 0.0;
        for j in 0..m {
            dot += dict[[r, j]] * z[j];
        }
        let diff = x[r] - dot;
        residual_sq += diff * diff;
    }

    Ok((
        z,
        ColumnReport {
            iterations,
            converged,
            objective,
            residual: residual_sq.sqrt(),
            q: None,
            lambda,
            rho,
            gram_condition: cond,
            flops_per_iteration: flops,
            objective_trace: trace,
        },
    ))
}
