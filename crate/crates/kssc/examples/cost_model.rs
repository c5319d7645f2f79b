//! Predicting per-iteration work and resident memory before running anything.
//!
//! Run with: `cargo run --example cost_model`
//!
//! The cost model counts the floating-point operations one solver iteration
//! performs over all columns and the floats each method keeps resident, as a
//! function of N (columns), D (ambient dimension) and k (neighbourhood size).
//! The dense methods scale quadratically in N on both axes; the filtered
//! methods replace one factor of N by k.  The same numbers back the dense
//! solvers' memory guard, which refuses jobs whose resident set would exceed
//! the configured budget.

use kssc::metrics::{cost_model, CostModelInput, Method};
use kssc::Result;

fn estimate(method: Method, n: usize, d: usize, k: Option<usize>) -> Result<(u64, u64)> {
    let est = cost_model(&CostModelInput {
        method,
        num_samples: n,
        ambient_dim: d,
        neighbors: k,
    })?;
    Ok((est.flops_per_iteration, est.floats_resident))
}

fn main() -> Result<()> {
    // The reference operating point: N = 1000 columns, D = 500, k = 10.
    println!("reference point (N = 1000, D = 500, k = 10):");
    println!("  {:<14} {:>16} {:>16}", "method", "FLOPs/iter", "floats resident");
    for (method, k) in [
        (Method::KsscRelaxed, Some(10)),
        (Method::KsscExact, Some(10)),
        (Method::SscRelaxed, None),
        (Method::SscExact, None),
    ] {
        let (flops, floats) = estimate(method, 1000, 500, k)?;
        println!("  {:<14} {flops:>16} {floats:>16}", method.name());
    }
    let (kf, _) = estimate(Method::KsscRelaxed, 1000, 500, Some(10))?;
    let (df, _) = estimate(Method::SscRelaxed, 1000, 500, None)?;
    println!("  relaxed dense/filtered FLOP ratio: {:.1}x\n", df as f64 / kf as f64);

    // Growth in N at fixed D = 500, k = 10: the filtered methods grow
    // linearly, the dense ones quadratically.
    println!("scaling in N (relaxed variants, D = 500, k = 10):");
    println!(
        "  {:>6} {:>16} {:>14} {:>16} {:>14}",
        "N", "filtered FLOPs", "filtered MB", "dense FLOPs", "dense MB"
    );
    for n in [1000usize, 2000, 4000, 8000] {
        let (kf, km) = estimate(Method::KsscRelaxed, n, 500, Some(10))?;
        let (df, dm) = estimate(Method::SscRelaxed, n, 500, None)?;
        println!(
            "  {n:>6} {kf:>16} {:>14.1} {df:>16} {:>14.1}",
            km as f64 * 8.0 / 1e6,
            dm as f64 * 8.0 / 1e6
        );
    }
    println!();
    println!("At N = 8000 the dense relaxed solver would keep ~2 GB resident; with");
    println!("a smaller budget in SolverConfig::memory_budget_bytes the dense entry");
    println!("points refuse the job up front instead of thrashing.");
    Ok(())
}
