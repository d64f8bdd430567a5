//! Clustering of regular maps: the symmetrized self-expressive code is used as
//! a graph, over-segmented spectrally, and the segments are consolidated by
//! Normalized Subspace Inclusion (NSI). Irregular maps are then offered to
//! the consolidated classes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::baselines::UNASSIGNED;
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, Metric};
use crate::self_expressive::{irregularity, solve_coefficients, split_regular, CoefficientMatrix, IrregularityVector, RegularSplit, SolverConfig};

/// Symmetric nonnegative adjacency with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    w: DMatrix<f64>,
}

impl AffinityGraph {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::ShapeMismatch(format!("affinity is {}x{}", w.nrows(), w.ncols())));
        }
        let n = w.nrows();
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!("affinity has nonzero diagonal at {i}")));
            }
            for j in 0..n {
                if w[(i, j)] < 0.0 || w[(i, j)] != w[(j, i)] || !w[(i, j)].is_finite() {
                    return Err(Error::InvalidArgument(format!("affinity entry ({i}, {j}) is not symmetric nonnegative")));
                }
            }
        }
        Ok(AffinityGraph { w })
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.w.nrows() == 0
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.w.row_iter().map(|r| r.sum()).collect()
    }

    /// `I - D^{-1/2} W D^{-1/2}`, with isolated vertices left as identity rows.
    pub fn normalized_laplacian(&self) -> DMatrix<f64> {
        let inv_sqrt: Vec<f64> = self
            .degrees()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - inv_sqrt[i] * self.w[(i, j)] * inv_sqrt[j]
        })
    }
}

/// `C + C'` restricted to `idx`, diagonal zeroed and round-off negatives clamped.
pub fn build_affinity(c: &CoefficientMatrix, idx: &[usize]) -> AffinityGraph {
    let e = c.entries();
    let n = idx.len();
    let w = DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            0.0
        } else {
            (e[(idx[a], idx[b])] + e[(idx[b], idx[a])]).max(0.0)
        }
    });
    AffinityGraph { w }
}

/// Ascending eigenpairs of a symmetric matrix.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// Number of (near-)zero eigenvalues of the normalized Laplacian; each
/// isolated vertex is its own component.
pub fn estimate_cluster_count(graph: &AffinityGraph, eps_eig: f64) -> usize {
    let deg = graph.degrees();
    let connected: Vec<usize> = (0..graph.len()).filter(|&i| deg[i] > 0.0).collect();
    let isolated = graph.len() - connected.len();
    let zeros = if connected.is_empty() {
        0
    } else {
        let sub = AffinityGraph {
            w: graph.w.select_rows(&connected).select_columns(&connected),
        };
        let (values, _) = sorted_eigen(sub.normalized_laplacian());
        values.iter().filter(|&&v| v < eps_eig).count()
    };
    (isolated + zeros).max(1)
}

/// Normalized spectral clustering into `gamma` groups.
///
/// Rows of the `gamma` lowest Laplacian eigenvectors are scaled to unit norm
/// (zero rows stay zero) and grouped by seeded k-means.
pub fn spectral_segment(graph: &AffinityGraph, gamma: usize, seed: u64, restarts: usize) -> Result<Vec<usize>> {
    let n = graph.len();
    if gamma == 0 || gamma > n {
        return Err(Error::InvalidArgument(format!("cannot segment {n} maps into {gamma} clusters")));
    }
    if gamma == 1 {
        return Ok(vec![0; n]);
    }
    let (_, vectors) = sorted_eigen(graph.normalized_laplacian());
    // points as columns: gamma x n
    let mut embedding = vectors.columns(0, gamma).transpose();
    for mut col in embedding.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    Ok(kmeans(&embedding, gamma, restarts, seed, Metric::Euclidean)?.labels)
}

/// Orthonormal basis of a cluster's linear span.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    u: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Wraps a basis; columns must be orthonormal.
    pub fn new(u: DMatrix<f64>) -> Result<Self> {
        if u.ncols() == 0 || u.ncols() > u.nrows() {
            return Err(Error::InvalidArgument(format!("basis of shape {}x{}", u.nrows(), u.ncols())));
        }
        let gram = u.transpose() * &u;
        let err = (gram - DMatrix::identity(u.ncols(), u.ncols())).amax();
        if err > 1e-8 {
            return Err(Error::InvalidArgument(format!("basis columns not orthonormal (error {err:e})")));
        }
        Ok(SubspaceBasis { u })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.u.nrows()
    }

    /// Squared norm of the projection of `x / |x|` onto the subspace.
    pub fn affinity(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.ambient() {
            return Err(Error::ShapeMismatch(format!("vector of length {} in R^{}", x.len(), self.ambient())));
        }
        let n = x.norm();
        if n == 0.0 {
            return Err(Error::Internal("zero map cannot be projected".into()));
        }
        Ok((self.u.transpose() * x / n).norm_squared().clamp(0.0, 1.0))
    }
}

/// Leading left singular vectors of the (uncentered) cluster matrix holding
/// at least `energy` of its squared Frobenius norm.
pub fn subspace_basis(columns: &DMatrix<f64>, energy: f64) -> Result<SubspaceBasis> {
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::InvalidArgument(format!("energy {energy} outside (0, 1]")));
    }
    if columns.ncols() == 0 {
        return Err(Error::DegenerateCluster("cluster has no maps".into()));
    }
    let total = columns.norm_squared();
    if total == 0.0 {
        return Err(Error::DegenerateCluster("cluster maps are all zero".into()));
    }
    let svd = columns.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let sq: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
    let sum: f64 = sq.iter().sum();
    let mut acc = 0.0;
    let mut rank = sq.len();
    for (r, s) in sq.iter().enumerate() {
        acc += s;
        if acc >= energy * sum * (1.0 - 1e-12) {
            rank = r + 1;
            break;
        }
    }
    let rank = rank.clamp(1, columns.ncols().min(columns.nrows()));
    Ok(SubspaceBasis {
        u: u.select_columns(&order[..rank]),
    })
}

/// `tr(A' B B' A) / min(dim A, dim B)`, clamped to `[0, 1]`.
pub fn nsi(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    if a.ambient() != b.ambient() {
        return Err(Error::ShapeMismatch(format!(
            "subspaces live in R^{} and R^{}",
            a.ambient(),
            b.ambient()
        )));
    }
    let cross = a.u.transpose() * &b.u;
    Ok((cross.norm_squared() / a.dim().min(b.dim()) as f64).clamp(0.0, 1.0))
}

/// Pairwise NSI of a list of bases.
pub fn nsi_matrix(bases: &[SubspaceBasis]) -> Result<DMatrix<f64>> {
    let n = bases.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in i + 1..n {
            let v = nsi(&bases[i], &bases[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

/// Result of consolidating segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Merged {
    /// Class of every map, numbered by earliest member.
    pub labels: Vec<usize>,
    /// Class of every input segment.
    pub segment_class: Vec<usize>,
    pub bases: Vec<SubspaceBasis>,
}

impl Merged {
    pub fn k(&self) -> usize {
        self.bases.len()
    }
}

/// Joins segments whose pairwise NSI exceeds `th_nsi`, transitively, and
/// recomputes one basis per resulting class from its maps.
///
/// `labels[i]` is the segment of column `i` of `x`; `bases[s]` the basis of segment `s`.
pub fn merge_clusters(
    x: &DMatrix<f64>,
    labels: &[usize],
    bases: &[SubspaceBasis],
    th_nsi: f64,
    energy: f64,
) -> Result<Merged> {
    if labels.len() != x.ncols() {
        return Err(Error::ShapeMismatch(format!("{} labels for {} maps", labels.len(), x.ncols())));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= bases.len()) {
        return Err(Error::InvalidArgument(format!("segment {bad} has no basis")));
    }
    let s = bases.len();
    let mut parent: Vec<usize> = (0..s).collect();
    for i in 0..s {
        for j in i + 1..s {
            if nsi(&bases[i], &bases[j])? > th_nsi {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // number classes by the first map that belongs to them
    let mut class_of_root = vec![usize::MAX; s];
    let mut next = 0;
    let mut map_labels = Vec::with_capacity(labels.len());
    for &seg in labels {
        let root = find(&mut parent, seg);
        if class_of_root[root] == usize::MAX {
            class_of_root[root] = next;
            next += 1;
        }
        map_labels.push(class_of_root[root]);
    }
    // segments without maps keep a class so the mapping is total
    let segment_class: Vec<usize> = (0..s)
        .map(|seg| {
            let root = find(&mut parent, seg);
            if class_of_root[root] == usize::MAX {
                class_of_root[root] = next;
                next += 1;
            }
            class_of_root[root]
        })
        .collect();
    let mut class_bases = Vec::with_capacity(next);
    for k in 0..next {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| map_labels[i] == k).collect();
        if members.is_empty() {
            let seg = segment_class.iter().position(|&c| c == k).expect("class has a segment");
            class_bases.push(bases[seg].clone());
        } else {
            class_bases.push(subspace_basis(&x.select_columns(&members), energy)?);
        }
    }
    Ok(Merged {
        labels: map_labels,
        segment_class,
        bases: class_bases,
    })
}

/// Class of each column, or `None` when no class affinity exceeds `threshold`.
///
/// Affinity to class `k` is the squared norm of the normalized map projected
/// on its basis; ties go to the lower class index.
pub fn reclassify_irregular(x: &DMatrix<f64>, bases: &[SubspaceBasis], threshold: f64) -> Result<Vec<Option<usize>>> {
    x.column_iter()
        .map(|col| {
            let v = col.into_owned();
            let mut best: Option<(usize, f64)> = None;
            for (k, b) in bases.iter().enumerate() {
                let a = b.affinity(&v)?;
                if best.map_or(true, |(_, bv)| a > bv) {
                    best = Some((k, a));
                }
            }
            Ok(best.filter(|&(_, a)| a > threshold).map(|(k, _)| k))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Regular after the split and clustered directly.
    RegularFromSplit,
    /// Flagged irregular, then joined a class.
    Reclassified,
    /// Remains irregular.
    Irregular,
}

/// Final class per map; [`UNASSIGNED`] marks irregular maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labeling {
    pub labels: Vec<i64>,
    pub k: usize,
    pub provenance: Vec<Provenance>,
}

impl Labeling {
    pub fn n_irregular(&self) -> usize {
        self.labels.iter().filter(|&&l| l == UNASSIGNED).count()
    }

    pub fn irregular_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.n_irregular() as f64 / self.labels.len() as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Fraction of maps flagged irregular by the split.
    pub p: f64,
    /// NSI above which segments merge.
    pub th_nsi: f64,
    /// Affinity above which an irregular map joins a class; `th_nsi` when unset.
    pub th_reclass: Option<f64>,
    /// Number of spectral segments; derived from the Laplacian when unset.
    pub gamma: Option<usize>,
    pub eps_eig: f64,
    /// Fraction of a cluster's energy retained by its basis.
    pub energy: f64,
    pub seed: u64,
    pub kmeans_restarts: usize,
    pub solver: SolverConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            p: 0.5,
            th_nsi: 0.93,
            th_reclass: None,
            gamma: None,
            eps_eig: 1e-3,
            energy: 0.90,
            seed: 0,
            kmeans_restarts: 20,
            solver: SolverConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p = {} outside [0, 1)", self.p)));
        }
        if !(self.th_nsi > 0.0 && self.th_nsi <= 1.0) {
            return Err(Error::InvalidArgument(format!("NSI threshold {} outside (0, 1]", self.th_nsi)));
        }
        if let Some(t) = self.th_reclass {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidArgument(format!("reclassification threshold {t} outside [0, 1]")));
            }
        }
        if !(self.energy > 0.0 && self.energy <= 1.0) {
            return Err(Error::InvalidArgument(format!("energy {} outside (0, 1]", self.energy)));
        }
        if !(self.eps_eig > 0.0) {
            return Err(Error::InvalidArgument("eigenvalue tolerance must be positive".into()));
        }
        if self.gamma == Some(0) {
            return Err(Error::InvalidArgument("gamma must be at least 1".into()));
        }
        self.solver.validate()
    }

    pub fn reclass_threshold(&self) -> f64 {
        self.th_reclass.unwrap_or(self.th_nsi)
    }
}

/// Over-segmentation size used when none is given: `ceil(1.5 K)`.
pub fn default_gamma(k_est: usize) -> usize {
    k_est.max((1.5 * k_est as f64).ceil() as usize)
}

/// Everything the pipeline computed on the way to the labeling.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub labeling: Labeling,
    pub coefficients: CoefficientMatrix,
    pub irregularity: IrregularityVector,
    pub split: RegularSplit,
    pub k_est: usize,
    pub gamma: usize,
    /// Spectral segment of each regular map, aligned with `split.regular_idx`.
    pub segments: Vec<usize>,
    /// NSI between segment bases.
    pub nsi: DMatrix<f64>,
    pub merged: Merged,
}

/// Solves the self-expressive program, then clusters.
pub fn run_pipeline(x: &DMatrix<f64>, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let c = solve_coefficients(x, &cfg.solver)?;
    let irr = irregularity(x, &c)?;
    cluster_with_coefficients(x, c, irr, cfg)
}

/// Clustering steps given a solved coefficient matrix and its irregularities.
pub fn cluster_with_coefficients(
    x: &DMatrix<f64>,
    coefficients: CoefficientMatrix,
    irregularity: IrregularityVector,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput> {
    cfg.validate()?;
    let m = x.ncols();
    if coefficients.len() != m || irregularity.len() != m {
        return Err(Error::ShapeMismatch("coefficients and irregularities must match the data".into()));
    }
    let split = split_regular(&irregularity, cfg.p)?;
    let reg = &split.regular_idx;
    if reg.is_empty() {
        return Err(Error::InsufficientData("no regular maps left after the split".into()));
    }
    let graph = build_affinity(&coefficients, reg);
    let k_est = estimate_cluster_count(&graph, cfg.eps_eig);
    let gamma = match cfg.gamma {
        Some(g) => g,
        None => default_gamma(k_est).min(reg.len()),
    };
    let segments = spectral_segment(&graph, gamma, cfg.seed, cfg.kmeans_restarts)?;

    let x_reg = x.select_columns(reg);
    let seg_bases = (0..gamma)
        .map(|s| {
            let members: Vec<usize> = (0..reg.len()).filter(|&i| segments[i] == s).collect();
            subspace_basis(&x_reg.select_columns(&members), cfg.energy)
        })
        .collect::<Result<Vec<_>>>()?;
    let nsi = nsi_matrix(&seg_bases)?;
    let merged = merge_clusters(&x_reg, &segments, &seg_bases, cfg.th_nsi, cfg.energy)?;

    let mut labels = vec![UNASSIGNED; m];
    let mut provenance = vec![Provenance::Irregular; m];
    for (pos, &i) in reg.iter().enumerate() {
        labels[i] = merged.labels[pos] as i64;
        provenance[i] = Provenance::RegularFromSplit;
    }
    if !split.irregular_idx.is_empty() {
        let x_irr = x.select_columns(&split.irregular_idx);
        let assigned = reclassify_irregular(&x_irr, &merged.bases, cfg.reclass_threshold())?;
        for (&i, a) in split.irregular_idx.iter().zip(assigned) {
            if let Some(k) = a {
                labels[i] = k as i64;
                provenance[i] = Provenance::Reclassified;
            }
        }
    }
    let labeling = Labeling {
        labels,
        k: merged.k(),
        provenance,
    };
    Ok(PipelineOutput {
        labeling,
        coefficients,
        irregularity,
        split,
        k_est,
        gamma,
        segments,
        nsi,
        merged,
    })
}
