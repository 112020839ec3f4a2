//! k-means with k-means++ seeding, the adjusted Rand index, and a 2-D PCA
//! projection for plotting.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{derive_seed, Standardizer};
use crate::matrix::Dataset;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} exceeds the {docs} documents")]
    KTooLarge { k: usize, docs: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("partitions differ in length ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("no features selected for clustering")]
    NoFeatures,
    #[error("row {row}, feature {feature} is not finite")]
    NonFinite { row: usize, feature: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig { k: 3, seed: 42, max_iter: 300, restarts: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each assignment step of the winning restart.
    pub inertia_trace: Vec<f64>,
    /// Number of times an empty cluster was reseeded.
    pub reseeds: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        let d = sq_dist(x, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(x: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut centroids = vec![x[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = x.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point coincides with a centroid already
            Err(_) => rng.gen_range(0..n),
        };
        centroids.push(x[next].clone());
        for (d, r) in d2.iter_mut().zip(x) {
            *d = d.min(sq_dist(r, centroids.last().unwrap()));
        }
    }
    centroids
}

/// One seeded Lloyd run. Inertia is recorded after every assignment step, so
/// the trace is non-increasing.
fn lloyd(x: &[Vec<f64>], k: usize, max_iter: usize, seed: u64) -> KMeansResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = x[0].len();
    let mut centroids = plus_plus(x, k, &mut rng);
    let mut assignments = vec![usize::MAX; x.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut reseeds = 0;
    loop {
        let step: Vec<(usize, f64)> = x.par_iter().map(|r| nearest(r, &centroids)).collect();
        let changed = step.iter().zip(&assignments).any(|(s, &a)| s.0 != a);
        for (a, s) in assignments.iter_mut().zip(&step) {
            *a = s.0;
        }
        let mut dists: Vec<f64> = step.iter().map(|s| s.1).collect();
        trace.push(dists.iter().sum());
        if !changed || iterations >= max_iter {
            break;
        }
        iterations += 1;
        // update step; an empty cluster takes over the point farthest from its centroid
        let mut sums = vec![vec![0.0; p]; k];
        let mut counts = vec![0usize; k];
        for (r, &a) in x.iter().zip(&assignments) {
            counts[a] += 1;
            for j in 0..p {
                sums[a][j] += r[j];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..x.len())
                    .filter(|&i| counts[assignments[i]] > 1)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
                if let Some(i) = far {
                    log::warn!("k-means: empty cluster {c} reseeded with document {i}");
                    reseeds += 1;
                    let old = assignments[i];
                    counts[old] -= 1;
                    for j in 0..p {
                        sums[old][j] -= x[i][j];
                    }
                    assignments[i] = c;
                    counts[c] = 1;
                    sums[c] = x[i].clone();
                    dists[i] = 0.0;
                }
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = *trace.last().unwrap();
    KMeansResult { assignments, centroids, inertia, iterations, inertia_trace: trace, reseeds }
}

/// Best of `restarts` seeded Lloyd runs by inertia (earliest restart wins ties).
pub fn kmeans(x: &[Vec<f64>], cfg: &KMeansConfig) -> Result<KMeansResult, ClusterError> {
    if cfg.k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if cfg.k > x.len() {
        return Err(ClusterError::KTooLarge { k: cfg.k, docs: x.len() });
    }
    if x[0].is_empty() {
        return Err(ClusterError::NoFeatures);
    }
    for (row, r) in x.iter().enumerate() {
        if let Some(feature) = r.iter().position(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite { row, feature });
        }
    }
    let runs: Vec<KMeansResult> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| lloyd(x, cfg.k, cfg.max_iter, derive_seed(cfg.seed, r as u64)))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.inertia < runs[best].inertia {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).unwrap())
}

fn comb2(n: u64) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index from the contingency table of two partitions.
/// Returns 1.0 when both partitions are trivial in the same way (all
/// singletons or one cluster) and the expected index equals the maximum.
pub fn adjusted_rand_index(pred: &[usize], truth: &[usize]) -> Result<f64, ClusterError> {
    if pred.len() != truth.len() {
        return Err(ClusterError::SizeMismatch(pred.len(), truth.len()));
    }
    let n = pred.len() as u64;
    let mut table: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut a: BTreeMap<usize, u64> = BTreeMap::new();
    let mut b: BTreeMap<usize, u64> = BTreeMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *table.entry((p, t)).or_insert(0) += 1;
        *a.entry(p).or_insert(0) += 1;
        *b.entry(t).or_insert(0) += 1;
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sa: f64 = a.values().map(|&c| comb2(c)).sum();
    let sb: f64 = b.values().map(|&c| comb2(c)).sum();
    let total = comb2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sa * sb / total;
    let max = (sa + sb) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Projection onto the top two principal axes of the centred data. Each axis
/// is signed so that its largest-magnitude loading is positive.
pub fn pca_2d(x: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = x.len();
    let p = x.first().map_or(0, Vec::len);
    if n == 0 || p == 0 {
        return vec![[0.0, 0.0]; n];
    }
    let mean: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centred = DMatrix::from_fn(n, p, |i, j| x[i][j] - mean[j]);
    let cov = centred.transpose() * &centred / (n.max(2) - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let axes: Vec<Vec<f64>> = order
        .iter()
        .take(2)
        .map(|&c| {
            let v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let lead = v.iter().copied().fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
            if lead < 0.0 {
                v.iter().map(|a| -a).collect()
            } else {
                v
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut out = [0.0; 2];
            for (o, axis) in out.iter_mut().zip(&axes) {
                *o = (0..p).map(|j| centred[(i, j)] * axis[j]).sum();
            }
            out
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPurity {
    pub class: String,
    /// Cluster holding most documents of `class`.
    pub cluster: usize,
    /// Share of that cluster's documents belonging to `class`.
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub doc_ids: Vec<String>,
    pub class_names: Vec<String>,
    pub truth: Vec<usize>,
    /// Clustered features in name order, matching the centroid columns.
    pub features: Vec<String>,
    pub config: KMeansConfig,
    pub standardized: bool,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    pub ari: f64,
    pub purity: Vec<ClusterPurity>,
    /// Every selected feature is constant across documents.
    pub zero_variance: bool,
    pub projection: Vec<[f64; 2]>,
}

/// Purity of the cluster that captures most of each true class.
pub fn class_purity(assignments: &[usize], truth: &[usize], class_names: &[String], k: usize) -> Vec<ClusterPurity> {
    let mut table = vec![vec![0usize; k]; class_names.len()];
    for (&a, &t) in assignments.iter().zip(truth) {
        table[t][a] += 1;
    }
    let sizes: Vec<usize> = (0..k).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    class_names
        .iter()
        .enumerate()
        .map(|(t, name)| {
            let mut cluster = 0;
            for c in 0..k {
                if table[t][c] > table[t][cluster] {
                    cluster = c;
                }
            }
            let purity = if sizes[cluster] == 0 { 0.0 } else { table[t][cluster] as f64 / sizes[cluster] as f64 };
            ClusterPurity { class: name.clone(), cluster, purity }
        })
        .collect()
}

/// Restricts `data` to `features`, optionally z-scores, clusters, and scores
/// the partition against the dataset classes.
pub fn cluster_and_score(
    data: &Dataset,
    features: &[String],
    cfg: &KMeansConfig,
    standardize: bool,
) -> Result<ClusteringReport, ClusterError> {
    if features.is_empty() {
        return Err(ClusterError::NoFeatures);
    }
    // cluster on name-sorted columns so the input order cannot change the result
    let mut sorted = features.to_vec();
    sorted.sort();
    let sub = data.select_features(&sorted).map_err(|_| ClusterError::NoFeatures)?;
    let zero_variance = (0..features.len()).all(|j| sub.x.iter().all(|r| r[j] == sub.x[0][j]));
    if zero_variance {
        log::warn!("clustering input has zero variance in every selected feature");
    }
    let x = if standardize { Standardizer::fit(&sub.x).transform(&sub.x) } else { sub.x.clone() };
    let km = kmeans(&x, cfg)?;
    let ari = adjusted_rand_index(&km.assignments, &sub.y)?;
    let purity = class_purity(&km.assignments, &sub.y, &sub.class_names, cfg.k);
    Ok(ClusteringReport {
        doc_ids: sub.doc_ids.clone(),
        class_names: sub.class_names.clone(),
        truth: sub.y.clone(),
        features: sorted,
        config: cfg.clone(),
        standardized: standardize,
        assignments: km.assignments,
        centroids: km.centroids,
        inertia: km.inertia,
        iterations: km.iterations,
        ari,
        purity,
        zero_variance,
        projection: pca_2d(&x),
    })
}
