//! How well k-nearest-neighbour candidate sets respect subspace membership.
//!
//! Run with: `cargo run --example neighbor_filtering`
//!
//! The filtered solver only spends effort on each column's k most correlated
//! columns (its candidate set Ω_i).  That pays off when those candidates lie
//! in the same subspace as the column itself.  This example measures that
//! directly: the true-positive rate (fraction of candidates from the right
//! subspace) and the fraction of columns whose candidate set is entirely
//! clean, as k grows and as noise is added.

use kssc::dataset::{generate_union, SyntheticSpec};
use kssc::neighbors::{knn_select, neighbor_quality};
use kssc::Result;

fn main() -> Result<()> {
    // 5 subspaces of dimension 4 in ambient dimension 30, 40 points each.
    let spec = SyntheticSpec::uniform(5, 4, 40, 30, 11);
    let clean = generate_union(&spec)?;

    let mut noisy_spec = spec.clone();
    noisy_spec.noise_psnr_db = Some(20.0);
    let noisy = generate_union(&noisy_spec)?;

    println!("{:>4}  {:>22}  {:>22}", "k", "clean data", "20 dB noise");
    println!("{:>4}  {:>10} {:>11}  {:>10} {:>11}", "", "same-space", "all-clean", "same-space", "all-clean");
    for k in [2usize, 5, 10, 20, 40] {
        let mut cells = Vec::new();
        for union in [&clean, &noisy] {
            let omega = knn_select(&union.matrix, k)?;
            let q = neighbor_quality(&omega, &union.labels)?;
            cells.push((q.true_positive_rate(), q.zero_false_positive_fraction()));
        }
        println!(
            "{k:>4}  {:>9.1}% {:>10.1}%  {:>9.1}% {:>10.1}%",
            100.0 * cells[0].0,
            100.0 * cells[0].1,
            100.0 * cells[1].0,
            100.0 * cells[1].1,
        );
    }
    println!();
    println!("Small k keeps candidate sets pure; pushing k towards the number of");
    println!("points per subspace (40 here) forces wrong-subspace candidates in,");
    println!("and noise lowers purity at every k.  The filtered solver tolerates a");
    println!("few impostors — the sparsity penalty still prefers same-subspace");
    println!("columns — but purity is what makes small candidate sets safe.");
    Ok(())
}
