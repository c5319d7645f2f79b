//! Batch driver: solves every column against its neighbour dictionary in
//! parallel and assembles the column-sparse coefficient matrix.

use std::time::Instant;

use rayon::prelude::*;

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::neighbors::NeighborSets;
use crate::solver::{
    solve_column_exact, solve_column_relaxed, ColumnReport, SolverConfig, SolverReport,
    SparseCoefficients, SparseEntry, Variant,
};

/// Percentage of failed columns above which the whole batch aborts.
const FAILURE_THRESHOLD_PERCENT: u32 = 10;

/// Solves the chosen problem form for every column of `x` restricted to its
/// neighbour set, in parallel.
///
/// Individual column failures are tolerated up to 10% of all columns (the
/// failing columns simply keep an empty coefficient set and are listed in the
/// report); beyond that the batch aborts with
/// [`Error::SolverFailures`]. Entries that solve to exactly zero are dropped,
/// so the result stores at most `k` entries per column, all inside the
/// column's neighbour set.
pub fn solve_all(
    x: &DataMatrix,
    omega: &NeighborSets,
    cfg: &SolverConfig,
    variant: Variant,
) -> Result<(SparseCoefficients, SolverReport)> {
    cfg.validate()?;
    let n = x.num_samples();
    if omega.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} neighbour sets for {n} columns",
            omega.len()
        )));
    }

    let start = Instant::now();
    let outcomes: Vec<std::result::Result<(Vec<SparseEntry>, ColumnReport), String>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let support = omega.set(i);
            let dict = x.gather_columns(support);
            let solved = match variant {
                Variant::Relaxed => {
                    solve_column_relaxed(x.column(i), dict.view(), cfg).map(|(z, rep)| (z, rep))
                }
                Variant::Exact => {
                    solve_column_exact(x.column(i), dict.view(), cfg).map(|(z, _e, rep)| (z, rep))
                }
            };
            match solved {
                Ok((z, mut report)) => {
                    let entries: Vec<SparseEntry> = support
                        .iter()
                        .zip(z.iter())
                        .filter(|(_, &v)| v != 0.0)
                        .map(|(&row, &value)| SparseEntry { row, value })
                        .collect();
                    report.objective_trace = Vec::new();
                    Ok((entries, report))
                }
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();

    let mut columns = Vec::with_capacity(n);
    let mut reports = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((entries, report)) => {
                columns.push(entries);
                reports.push(report);
            }
            Err(msg) => {
                columns.push(Vec::new());
                reports.push(empty_report());
                failures.push((i, msg));
            }
        }
    }

    if failures.len() * 100 > n * FAILURE_THRESHOLD_PERCENT as usize {
        return Err(Error::SolverFailures {
            failed: failures.len(),
            total: n,
            threshold_percent: FAILURE_THRESHOLD_PERCENT,
        });
    }

    let coefficients = SparseCoefficients::from_columns(n, columns)?;
    let converged_columns = reports.iter().filter(|r| r.converged).count();
    let mean_iterations =
        reports.iter().map(|r| r.iterations).sum::<usize>() as f64 / n.max(1) as f64;
    let flops_per_iteration = reports.iter().map(|r| r.flops_per_iteration).sum();

    Ok((
        coefficients,
        SolverReport {
            variant,
            columns: reports,
            failures,
            converged_columns,
            mean_iterations,
            flops_per_iteration,
            wall_seconds: start.elapsed().as_secs_f64(),
            neighbors: omega.k(),
            clamped_k: omega.clamped(),
        },
    ))
}

fn empty_report() -> ColumnReport {
    ColumnReport {
        iterations: 0,
        converged: false,
        objective: f64::NAN,
        residual: f64::NAN,
        q: None,
        lambda: f64::NAN,
        rho: f64::NAN,
        gram_condition: f64::NAN,
        flops_per_iteration: 0,
        objective_trace: Vec::new(),
    }
}
