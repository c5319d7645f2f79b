//! The analytic guarantee for neighbour purity, evaluated numerically.
//!
//! Run with: `cargo run --example theorem_bound`
//!
//! For points drawn from a union of subspaces, a k-nearest-neighbour
//! candidate set is pure (no wrong-subspace point) with probability at least
//! `1 - 2 e^{-t} - e^{-k0} (eC)^{k0/C}` — provided the pairwise subspace
//! affinity stays below a threshold that shrinks with the subspace dimension
//! and the sample count.  The affinity is the root-mean of squared cosines
//! of the principal angles between two subspaces: 0 for orthogonal pairs,
//! 1 for identical ones.  A noise-aware variant tightens the threshold
//! further.  This example evaluates the bound across parameters and measures
//! real affinities to show which arrangements fall inside the guarantee.

use kssc::linalg::orthonormalize_columns;
use kssc::neighbors::{
    affinity_between, check_theorem_bound, NoiseBoundParams, TheoremBoundParams,
};
use kssc::Result;
use ndarray::{s, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn base_params() -> TheoremBoundParams {
    TheoremBoundParams {
        epsilon: 0.5,
        tail: 3.0,
        k0: 20.0,
        concentration: 2.0,
        samples: 200,
        subspace_dim: 5,
        min_subspace_dim: 5,
        affinity: 0.0,
        noise: None,
    }
}

fn main() -> Result<()> {
    // --- how the probability and the admissible affinity move with the
    // concentration count k0 (the covered neighbourhood size is k = k0 / C).
    println!("varying k0 (epsilon = 0.5, t = 3, C = 2, 200 samples, dimension 5):");
    println!(
        "  {:>5} {:>6} {:>22} {:>20}",
        "k0", "k", "success probability", "affinity threshold"
    );
    for k0 in [10.0f64, 20.0, 30.0, 40.0] {
        let bound = check_theorem_bound(&TheoremBoundParams { k0, ..base_params() })?;
        println!(
            "  {k0:>5.0} {:>6.0} {:>21.3}  {:>19.4}",
            bound.neighbors, bound.success_probability, bound.affinity_threshold
        );
    }
    println!("  (loose parameters make the tail terms dominate and the raw value");
    let weak = check_theorem_bound(&TheoremBoundParams {
        tail: 0.05,
        k0: 4.0,
        ..base_params()
    })?;
    println!(
        "   goes negative — t = 0.05, k0 = 4 gives raw {:.2}, clamped to {:.3})\n",
        weak.success_probability_raw, weak.success_probability
    );

    // --- measured affinities for three arrangements of two 5-dimensional
    // subspaces in ambient dimension 50.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pool = Array2::from_shape_fn((50, 10), |_| rng.sample::<f64, _>(StandardNormal));
    orthonormalize_columns(&mut pool)?;
    let orthogonal = affinity_between(
        &pool.slice(s![.., ..5]).to_owned(),
        &pool.slice(s![.., 5..]).to_owned(),
    )?;

    let mut a = Array2::from_shape_fn((50, 5), |_| rng.sample::<f64, _>(StandardNormal));
    let mut b = Array2::from_shape_fn((50, 5), |_| rng.sample::<f64, _>(StandardNormal));
    orthonormalize_columns(&mut a)?;
    orthonormalize_columns(&mut b)?;
    let independent = affinity_between(&a, &b)?;

    // Shared core: both bases keep the first 2 pool directions.
    let mut c = pool.slice(s![.., ..5]).to_owned();
    let mut d = pool.slice(s![.., ..5]).to_owned();
    d.slice_mut(s![.., 2..]).assign(&pool.slice(s![.., 5..8]));
    orthonormalize_columns(&mut c)?;
    orthonormalize_columns(&mut d)?;
    let sharing = affinity_between(&c, &d)?;

    println!("measured affinities vs the guarantee threshold:");
    let bound = check_theorem_bound(&base_params())?;
    for (name, affinity) in [
        ("exactly orthogonal pair", orthogonal),
        ("independent random pair", independent),
        ("pair sharing 2 of 5 directions", sharing),
    ] {
        let verdict = check_theorem_bound(&TheoremBoundParams { affinity, ..base_params() })?;
        println!(
            "  {name:<31} affinity {affinity:.4}  {}",
            if verdict.affinity_ok { "inside the guarantee" } else { "outside (no guarantee)" }
        );
    }
    println!("  threshold at these parameters: {:.4}\n", bound.affinity_threshold);

    // --- the noise-aware variant trades threshold for robustness: the slack
    // delta absorbs noise inner products, shrinking the admissible affinity,
    // and costs extra tail terms that stay negligible while sigma << delta.
    println!("noise-aware variant (sigma = 0.01, slack delta = 0.1, ambient 50):");
    let noisy = check_theorem_bound(&TheoremBoundParams {
        noise: Some(NoiseBoundParams {
            delta: 0.1,
            sigma: 0.01,
            ambient_dim: 50,
            sub_gaussian_c: 1.0 / 8.0,
        }),
        ..base_params()
    })?;
    println!(
        "  clean threshold {:.4} -> noisy threshold {:.4}, success probability {:.3}",
        bound.affinity_threshold, noisy.affinity_threshold, noisy.success_probability
    );
    Ok(())
}
