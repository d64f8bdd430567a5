//! Seeded Lloyd iterations with k-means++ starts, keeping the best of several
//! restarts. Points are matrix columns.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Squared Euclidean distance to the cluster mean.
    Euclidean,
    /// `1 - cos` to the normalized cluster mean; points are normalized first.
    Cosine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    /// Sum of point-to-center dissimilarities.
    pub inertia: f64,
}

const MAX_ITER: usize = 300;

fn normalize_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut y = x.clone();
    for mut c in y.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    y
}

fn dissimilarity(metric: Metric, x: &DMatrix<f64>, i: usize, centers: &DMatrix<f64>, k: usize) -> f64 {
    let p = x.column(i);
    let c = centers.column(k);
    match metric {
        Metric::Euclidean => (p - c).norm_squared(),
        Metric::Cosine => (1.0 - p.dot(&c)).max(0.0),
    }
}

fn plus_plus_init(metric: Metric, x: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = x.ncols();
    let mut centers = DMatrix::zeros(x.nrows(), k);
    centers.set_column(0, &x.column(rng.gen_range(0..n)));
    let mut best = vec![f64::INFINITY; n];
    for j in 1..k {
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.min(dissimilarity(metric, x, i, &centers, j - 1));
        }
        let total: f64 = best.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &b) in best.iter().enumerate() {
                if target < b {
                    chosen = i;
                    break;
                }
                target -= b;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.set_column(j, &x.column(pick));
    }
    centers
}

fn lloyd(metric: Metric, x: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> KMeansFit {
    let n = x.ncols();
    let mut centers = plus_plus_init(metric, x, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut cost = vec![0.0; n];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for i in 0..n {
            let (best, d) = (0..k)
                .map(|j| (j, dissimilarity(metric, x, i, &centers, j)))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            cost[i] = d;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = DMatrix::zeros(x.nrows(), k);
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let mut col = sums.column_mut(labels[i]);
            col += x.column(i);
            counts[labels[i]] += 1;
        }
        for j in 0..k {
            if counts[j] == 0 {
                // Reseed an empty cluster at the worst-fitted point.
                let far = (0..n).fold(0, |a, b| if cost[b] > cost[a] { b } else { a });
                centers.set_column(j, &x.column(far));
                cost[far] = 0.0;
                continue;
            }
            let mut c = sums.column(j) / counts[j] as f64;
            if metric == Metric::Cosine {
                let norm = c.norm();
                if norm > 0.0 {
                    c /= norm;
                }
            }
            centers.set_column(j, &c);
        }
    }
    let inertia = (0..n).map(|i| dissimilarity(metric, x, i, &centers, labels[i])).sum();
    KMeansFit { labels, inertia }
}

/// Best of `restarts` seeded runs by inertia.
pub fn kmeans(x: &DMatrix<f64>, k: usize, restarts: usize, seed: u64, metric: Metric) -> Result<KMeansFit> {
    let n = x.ncols();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("cannot form {k} clusters from {n} points")));
    }
    let data = match metric {
        Metric::Euclidean => x.clone(),
        Metric::Cosine => normalize_columns(x),
    };
    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let fit = lloyd(metric, &data, k, &mut rng);
        if best.as_ref().map_or(true, |b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}
