//! Clustering accuracy as two subspaces grow a shared core.
//!
//! Run with: `cargo run --example intersection_study`
//!
//! Two subspaces of dimension 6 are built from one orthonormal pool so that
//! they share exactly `t` basis directions.  At `t = 0` they are disjoint
//! and clustering is easy; at `t = 6` they are the same subspace and no
//! method can beat chance (50% error for two balanced clusters).  Sweeping
//! `t` traces how gracefully accuracy degrades in between.

use kssc::dataset::{generate_union, SyntheticSpec};
use kssc::metrics::sce;
use kssc::neighbors::knn_select;
use kssc::solver::{solve_all, SolverConfig, Variant};
use kssc::spectral::{build_affinity, ncut_segment};
use kssc::Result;

fn main() -> Result<()> {
    let dim = 6usize;
    let trials = 3u64;
    println!("two subspaces of dimension {dim}, ambient 80, 30 points each, k = 12");
    println!("{:>9} {:>12} {:>22}", "shared t", "mean error", "per-trial errors");
    for t in 0..=dim {
        let mut errors = Vec::new();
        for trial in 0..trials {
            let mut spec = SyntheticSpec::uniform(2, dim, 30, 80, 600 + 10 * t as u64 + trial);
            spec.shared_basis_count = t;
            let union = generate_union(&spec)?;
            let omega = knn_select(&union.matrix, 12)?;
            let (z, _) =
                solve_all(&union.matrix, &omega, &SolverConfig::default(), Variant::Relaxed)?;
            let seg = ncut_segment(&build_affinity(&z), 2, trial)?;
            errors.push(sce(&seg.labels, &union.labels)?);
        }
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.1}%")).collect();
        println!("{t:>9} {mean:>11.1}% {:>22}", shown.join("  "));
    }
    println!();
    println!("Error stays near zero while the shared core is small relative to the");
    println!("subspace dimension, then climbs towards the 50% chance level as the");
    println!("two subspaces merge — points in the shared core are genuinely");
    println!("ambiguous, so no self-expression method can tell them apart.");
    Ok(())
}
