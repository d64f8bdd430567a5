//! Reference clusterers under cosine dissimilarity and the clustering error
//! used to compare them with the subspace pipeline.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{kmeans, Metric};
use crate::sim::{derive_seed, WindowTruth};

/// Label of maps assigned to no class (irregular maps, DBSCAN noise).
pub const UNASSIGNED: i64 = -1;

/// Class of every map; outliers carry none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: Vec<Option<usize>>,
}

impl GroundTruth {
    pub fn new(labels: Vec<Option<usize>>) -> Self {
        GroundTruth { labels }
    }

    /// Ground truth aligned with the kept columns of a data matrix.
    pub fn from_windows(windows: &[WindowTruth], kept: &[usize]) -> Result<Self> {
        let labels = kept
            .iter()
            .map(|&i| {
                windows
                    .get(i)
                    .map(|w| (!w.outlier).then_some(w.config))
                    .ok_or_else(|| Error::ShapeMismatch(format!("no ground truth for window {i}")))
            })
            .collect::<Result<_>>()?;
        Ok(GroundTruth { labels })
    }

    pub fn is_outlier(&self, i: usize) -> bool {
        self.labels[i].is_none()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_regular(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials). Returns the column assigned to each row.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Fraction of ground-truth regular maps misassigned under the best
/// one-to-one correspondence between predicted and true classes.
///
/// Predictions below zero never match a class.
pub fn clustering_error(pred: &[i64], truth: &GroundTruth) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} maps",
            pred.len(),
            truth.len()
        )));
    }
    let regular: Vec<(i64, usize)> = pred
        .iter()
        .zip(&truth.labels)
        .filter_map(|(&p, t)| t.map(|t| (p, t)))
        .collect();
    if regular.is_empty() {
        return Ok(0.0);
    }
    let mut pred_ids: Vec<i64> = regular.iter().map(|r| r.0).filter(|&p| p >= 0).collect();
    pred_ids.sort_unstable();
    pred_ids.dedup();
    let mut true_ids: Vec<usize> = regular.iter().map(|r| r.1).collect();
    true_ids.sort_unstable();
    true_ids.dedup();
    let n = pred_ids.len().max(true_ids.len());
    let mut counts = vec![vec![0i64; n]; n];
    for &(p, t) in &regular {
        if p < 0 {
            continue;
        }
        let pi = pred_ids.binary_search(&p).expect("collected above");
        let ti = true_ids.binary_search(&t).expect("collected above");
        counts[pi][ti] += 1;
    }
    let cost: Vec<Vec<i64>> = counts.iter().map(|row| row.iter().map(|&c| -c).collect()).collect();
    let assignment = min_cost_assignment(&cost);
    let matched: i64 = assignment.iter().enumerate().map(|(r, &c)| counts[r][c]).sum();
    Ok((regular.len() as i64 - matched) as f64 / regular.len() as f64)
}

fn to_labels(labels: &[usize]) -> Vec<i64> {
    labels.iter().map(|&l| l as i64).collect()
}

/// Spherical k-means on the columns of `x`, best of `replicates` runs.
pub fn kmeans_angular(x: &DMatrix<f64>, k: usize, replicates: usize, seed: u64) -> Result<Vec<i64>> {
    Ok(to_labels(&kmeans(x, k, replicates, seed, Metric::Cosine)?.labels))
}

/// Pairwise `1 - cos` between columns.
pub fn cosine_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    let gram = x.transpose() * x;
    DMatrix::from_fn(x.ncols(), x.ncols(), |i, j| {
        if i == j {
            return 0.0;
        }
        let denom = norms[i] * norms[j];
        if denom == 0.0 {
            1.0
        } else {
            (1.0 - gram[(i, j)] / denom).max(0.0)
        }
    })
}

struct Medoids {
    slots: Vec<usize>,
    nearest: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Medoids {
    fn new(dist: &DMatrix<f64>, slots: Vec<usize>) -> Self {
        let n = dist.nrows();
        let mut m = Medoids {
            slots,
            nearest: vec![0; n],
            d1: vec![0.0; n],
            d2: vec![0.0; n],
        };
        m.refresh(dist);
        m
    }

    fn refresh(&mut self, dist: &DMatrix<f64>) {
        for o in 0..dist.nrows() {
            let (mut b1, mut b2, mut s1) = (f64::INFINITY, f64::INFINITY, 0);
            for (s, &med) in self.slots.iter().enumerate() {
                let d = dist[(o, med)];
                if d < b1 {
                    b2 = b1;
                    b1 = d;
                    s1 = s;
                } else if d < b2 {
                    b2 = d;
                }
            }
            self.nearest[o] = s1;
            self.d1[o] = b1;
            self.d2[o] = b2;
        }
    }

    fn cost(&self) -> f64 {
        self.d1.iter().sum()
    }
}

fn pam(dist: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = dist.nrows();
    // k-means++-style seeding on the dissimilarities
    let mut slots = vec![rng.gen_range(0..n)];
    while slots.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|o| slots.iter().map(|&m| dist[(o, m)]).fold(f64::INFINITY, f64::min).powi(2))
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (o, &w) in weights.iter().enumerate() {
                if target < w {
                    chosen = o;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            (0..n).find(|o| !slots.contains(o)).expect("k <= n")
        };
        if slots.contains(&next) {
            let free = (0..n).find(|o| !slots.contains(o)).expect("k <= n");
            slots.push(free);
        } else {
            slots.push(next);
        }
    }
    let mut med = Medoids::new(dist, slots);
    // SWAP phase: apply the best improving (medoid, non-medoid) exchange until none improves.
    for _ in 0..1000 {
        let mut best = (0.0, usize::MAX, usize::MAX);
        let mut delta = vec![0.0; k];
        for h in 0..n {
            if med.slots.contains(&h) {
                continue;
            }
            let mut shared = 0.0;
            delta.iter_mut().for_each(|d| *d = 0.0);
            for o in 0..n {
                let doh = dist[(o, h)];
                let gain = (doh - med.d1[o]).min(0.0);
                shared += gain;
                delta[med.nearest[o]] += doh.min(med.d2[o]) - med.d1[o] - gain;
            }
            for (s, &d) in delta.iter().enumerate() {
                let total = shared + d;
                if total < best.0 - 1e-12 {
                    best = (total, s, h);
                }
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        med.slots[best.1] = best.2;
        med.refresh(dist);
    }
    let cost = med.cost();
    let labels = med.nearest.clone();
    (labels, cost)
}

/// PAM k-medoids under cosine dissimilarity, best of `replicates` runs.
pub fn kmedoids_angular(x: &DMatrix<f64>, k: usize, replicates: usize, seed: u64) -> Result<Vec<i64>> {
    let n = x.ncols();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("cannot form {k} clusters from {n} points")));
    }
    let dist = cosine_distances(x);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..replicates.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let fit = pam(&dist, k, &mut rng);
        if best.as_ref().map_or(true, |b| fit.1 < b.1) {
            best = Some(fit);
        }
    }
    Ok(to_labels(&best.expect("one replicate").0))
}

/// Density clustering under cosine distance; noise is [`UNASSIGNED`].
///
/// Clusters are the connected components of core points, numbered by their
/// lowest member index. A border point joins the cluster of its lowest-index
/// core neighbor, so the result does not depend on visiting order.
pub fn dbscan(x: &DMatrix<f64>, eps: f64, min_pts: usize) -> Result<Vec<i64>> {
    if !(eps > 0.0) || min_pts == 0 {
        return Err(Error::InvalidArgument(format!("dbscan needs eps > 0 and min_pts >= 1 (eps {eps}, min_pts {min_pts})")));
    }
    let dist = cosine_distances(x);
    let n = x.ncols();
    let neighbors: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| dist[(i, j)] <= eps).collect()).collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();
    let mut labels = vec![UNASSIGNED; n];
    let mut next = 0i64;
    for start in 0..n {
        if !core[start] || labels[start] != UNASSIGNED {
            continue;
        }
        labels[start] = next;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if core[q] && labels[q] == UNASSIGNED {
                    labels[q] = next;
                    stack.push(q);
                }
            }
        }
        next += 1;
    }
    for i in 0..n {
        if !core[i] {
            if let Some(&c) = neighbors[i].iter().find(|&&j| core[j]) {
                labels[i] = labels[c];
            }
        }
    }
    Ok(labels)
}

/// Elbow of the sorted distances to the `k`-th nearest neighbor: the point
/// farthest from the chord joining the curve's ends, both axes rescaled to
/// unit range.
pub fn k_distance_elbow(x: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = x.ncols();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} needs at least {} points", k + 1)));
    }
    let dist = cosine_distances(x);
    let mut kd: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist[(i, j)]).collect();
            row.sort_by(f64::total_cmp);
            row[k - 1]
        })
        .collect();
    kd.sort_by(f64::total_cmp);
    let (lo, hi) = (kd[0], kd[n - 1]);
    if hi - lo <= 0.0 {
        return Ok(hi.max(f64::MIN_POSITIVE));
    }
    let best = (0..n)
        .map(|i| {
            let xi = i as f64 / (n - 1) as f64;
            let yi = (kd[i] - lo) / (hi - lo);
            (i, xi - yi)
        })
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(kd[best.0].max(f64::MIN_POSITIVE))
}

/// Settings of the reference clusterers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Seeded restarts of k-means and k-medoids.
    pub replicates: usize,
    /// DBSCAN neighborhood size, also the rank used for the elbow radius.
    pub min_pts: usize,
    /// DBSCAN radius; the k-distance elbow when unset.
    pub dbscan_eps: Option<f64>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            replicates: 10,
            min_pts: 5,
            dbscan_eps: None,
        }
    }
}

/// Reference clusterers by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    KMeans,
    KMedoids,
    Dbscan,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::KMeans, Baseline::KMedoids, Baseline::Dbscan];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::KMeans => "kmeans",
            Baseline::KMedoids => "kmedoids",
            Baseline::Dbscan => "dbscan",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Baseline::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Labels of the columns of `x`; `k` is ignored by DBSCAN.
    pub fn run(self, x: &DMatrix<f64>, k: usize, cfg: &BaselineConfig, seed: u64) -> Result<Vec<i64>> {
        match self {
            Baseline::KMeans => kmeans_angular(x, k, cfg.replicates, seed),
            Baseline::KMedoids => kmedoids_angular(x, k, cfg.replicates, seed),
            Baseline::Dbscan => {
                let eps = match cfg.dbscan_eps {
                    Some(e) => e,
                    None => k_distance_elbow(x, cfg.min_pts)?,
                };
                dbscan(x, eps, cfg.min_pts)
            }
        }
    }
}
