//! Normalized subspace inclusion between random subspaces and the merging of
//! an over-segmented union of subspaces.
//!
//! Usage: `cargo run --release --example nsi_merge`

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flowscape::subspace::{merge_clusters, nsi, subspace_basis};

fn main() -> flowscape::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut random = |rows: usize, cols: usize| DMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>());

    let big = random(30, 4);
    let small = &big * random(4, 2);
    let other = random(30, 3);
    let b_big = subspace_basis(&big, 1.0)?;
    let b_small = subspace_basis(&small, 1.0)?;
    let b_other = subspace_basis(&other, 1.0)?;
    println!("NSI(span, subspace of it) = {:.6}", nsi(&b_big, &b_small)?);
    println!("NSI(span, unrelated)      = {:.6}", nsi(&b_big, &b_other)?);

    // Two true subspaces, each split across two segments.
    let a = random(30, 2);
    let b = random(30, 2);
    let points = |basis: &DMatrix<f64>, n: usize, rng: &mut ChaCha8Rng| basis * DMatrix::from_fn(2, n, |_, _| rng.gen::<f64>());
    let mut rng2 = ChaCha8Rng::seed_from_u64(5);
    let blocks = [points(&a, 6, &mut rng2), points(&a, 6, &mut rng2), points(&b, 6, &mut rng2), points(&b, 6, &mut rng2)];
    let x = DMatrix::from_columns(&blocks.iter().flat_map(|m| m.column_iter().map(|c| c.into_owned())).collect::<Vec<_>>());
    let segments: Vec<usize> = (0..24).map(|i| i / 6).collect();
    let bases = blocks.iter().map(|m| subspace_basis(m, 0.999)).collect::<flowscape::Result<Vec<_>>>()?;
    let merged = merge_clusters(&x, &segments, &bases, 0.93, 0.999)?;
    println!("segments {segments:?}");
    println!("classes  {:?}", merged.labels);
    println!("{} segments merged into {} classes", bases.len(), merged.k());
    Ok(())
}
