//! Spectral kernel k-means, plain k-means with k-means++ seeding, and the
//! uniform-average / alternating multiple-kernel baselines.

// The k-means loops address points, centroids, and labels by one shared
// sample index; the range-loop form keeps those parallel accesses aligned.
#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eig;
use crate::error::{Error, Result};
use crate::kernel::{combine_raw, KernelMatrix, KernelSet};

/// Lloyd-iteration cap per restart.
const MAX_LLOYD_ITER: usize = 100;

/// Orthonormality tolerance for [`PartitionMatrix`].
const ORTHONORMAL_TOL: f64 = 1e-8;

/// Relative-change threshold that stops the alternating multiple-kernel loop.
const MKKM_REL_TOL: f64 = 1e-6;

/// Threshold below which a kernel's residual trace counts as degenerate.
const DEGENERATE_TRACE: f64 = 1e-14;

/// Cluster labels for `n` samples, each in `[0, clusters)`.
///
/// Empty clusters are permitted (they can be queried, not forbidden).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    clusters: usize,
}

impl ClusterAssignment {
    /// Validates that every label lies in `[0, clusters)`.
    pub fn new(labels: Vec<usize>, clusters: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput {
                context: "ClusterAssignment::new",
            });
        }
        if clusters == 0 {
            return Err(Error::InvalidParameter {
                name: "clusters",
                reason: "must be at least 1".into(),
            });
        }
        for (position, &label) in labels.iter().enumerate() {
            if label >= clusters {
                return Err(Error::LabelOutOfRange {
                    label,
                    position,
                    clusters,
                });
            }
        }
        Ok(Self { labels, clusters })
    }

    /// Label of each sample.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of clusters labels may refer to.
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; construction rejects empty label vectors.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Cluster ids with no members, ascending.
    pub fn empty_clusters(&self) -> Vec<usize> {
        let mut seen = vec![false; self.clusters];
        for &label in &self.labels {
            seen[label] = true;
        }
        (0..self.clusters).filter(|&c| !seen[c]).collect()
    }
}

/// Spectral embedding whose columns are orthonormal within 1e-8.
#[derive(Debug, Clone)]
pub struct PartitionMatrix {
    h: DMatrix<f64>,
}

impl PartitionMatrix {
    /// Validates column orthonormality (`HᵀH = I` within 1e-8).
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::EmptyInput {
                context: "PartitionMatrix::new",
            });
        }
        crate::kernel::check_finite("PartitionMatrix::new", &h)?;
        let gram = h.transpose() * &h;
        let k = h.ncols();
        let mut residual = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((gram[(i, j)] - target).abs());
            }
        }
        if residual > ORTHONORMAL_TOL {
            return Err(Error::NotSymmetric {
                context: "PartitionMatrix::new (columns not orthonormal)",
                residual,
                tolerance: ORTHONORMAL_TOL,
            });
        }
        Ok(Self { h })
    }

    /// The embedding matrix (`n x k`).
    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Consumes the wrapper.
    pub fn into_h(self) -> DMatrix<f64> {
        self.h
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    /// Number of columns (clusters).
    pub fn k(&self) -> usize {
        self.h.ncols()
    }
}

/// Top-`k` eigenvectors of a symmetric kernel, by descending eigenvalue
/// (ties broken by ascending index). Each eigenvector's sign is fixed so its
/// largest-magnitude component (lowest index on ties) is positive.
pub fn kkm_partition(kernel: &KernelMatrix, k: usize) -> Result<PartitionMatrix> {
    kernel.require_symmetric("kkm_partition")?;
    let n = kernel.n();
    if k < 1 || k > n {
        return Err(Error::InvalidParameter {
            name: "clusters",
            reason: format!("cluster count {k} outside valid range [1, {n}]"),
        });
    }
    let (_, vectors) = eig::symmetric_eigen(kernel.values())?;
    let mut h = vectors.columns(0, k).into_owned();
    for mut col in h.column_iter_mut() {
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }
    PartitionMatrix::new(h)
}

/// Lowest-WCSS run of [`kmeans`] along with its score.
#[derive(Debug, Clone)]
pub struct KmeansBest {
    /// Winning assignment.
    pub assignment: ClusterAssignment,
    /// Its within-cluster sum of squared distances.
    pub wcss: f64,
}

/// Lloyd's algorithm with k-means++ seeding, run `restarts` times; returns
/// the assignment with the lowest within-cluster sum of squares (earliest
/// restart on ties).
///
/// Restart `r` draws from the stream `r` of a counter RNG seeded with
/// `seed`, so results are deterministic and independent of how restarts are
/// scheduled across threads.
pub fn kmeans(points: &DMatrix<f64>, k: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    Ok(kmeans_best(points, k, restarts, seed)?.assignment)
}

/// [`kmeans`] variant that also reports the winning WCSS.
pub fn kmeans_best(
    points: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<KmeansBest> {
    let n = points.nrows();
    if n == 0 {
        return Err(Error::EmptyInput { context: "kmeans" });
    }
    crate::kernel::check_finite("kmeans", points)?;
    if k < 1 || k > n {
        return Err(Error::InvalidParameter {
            name: "clusters",
            reason: format!("cluster count {k} outside valid range [1, {n}]"),
        });
    }
    if restarts < 1 {
        return Err(Error::InvalidParameter {
            name: "restarts",
            reason: "must be at least 1".into(),
        });
    }

    let runs: Vec<(Vec<usize>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            lloyd(points, k, &mut rng)
        })
        .collect();

    let mut best = 0;
    for r in 1..runs.len() {
        if runs[r].1 < runs[best].1 {
            best = r;
        }
    }
    let (labels, wcss) = runs.into_iter().nth(best).expect("at least one restart");
    Ok(KmeansBest {
        assignment: ClusterAssignment::new(labels, k)?,
        wcss,
    })
}

/// Squared Euclidean distance between a sample row and a centroid row.
fn dist2(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    let mut acc = 0.0;
    for d in 0..points.ncols() {
        let diff = points[(i, d)] - centroids[(c, d)];
        acc += diff * diff;
    }
    acc
}

/// k-means++ seeding: first centroid uniform, then each next centroid drawn
/// with probability proportional to the squared distance to the nearest
/// chosen centroid (uniform fallback when every distance is zero).
fn seed_centroids(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = DMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from(&points.row(first));

    let mut nearest = vec![f64::INFINITY; n];
    for c in 1..k {
        for i in 0..n {
            nearest[i] = nearest[i].min(dist2(points, i, &centroids, c - 1));
        }
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).copy_from(&points.row(pick));
    }
    centroids
}

/// One seeded Lloyd run; returns `(labels, wcss)`.
fn lloyd(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = seed_centroids(points, k, rng);
    let mut labels = vec![0_usize; n];

    for _ in 0..MAX_LLOYD_ITER {
        // Assignment step; nearest centroid, lowest index on ties.
        let mut changed = false;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = dist2(points, i, &centroids, 0);
            for c in 1..k {
                let dc = dist2(points, i, &centroids, c);
                if dc < best_d {
                    best_d = dc;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }

        // Empty-cluster repair: relocate each empty centroid (ascending id)
        // to the sample farthest from its currently assigned centroid
        // (lowest index on ties), then claim that sample.
        let mut counts = vec![0_usize; k];
        for &label in &labels {
            counts[label] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut farthest = 0;
            let mut farthest_d = -1.0_f64;
            for i in 0..n {
                let di = dist2(points, i, &centroids, labels[i]);
                if di > farthest_d {
                    farthest_d = di;
                    farthest = i;
                }
            }
            centroids.row_mut(c).copy_from(&points.row(farthest));
            counts[labels[farthest]] -= 1;
            labels[farthest] = c;
            counts[c] = 1;
            changed = true;
        }

        // Update step: centroid = mean of its members.
        let mut sums: DMatrix<f64> = DMatrix::zeros(k, d);
        for i in 0..n {
            for col in 0..d {
                sums[(labels[i], col)] += points[(i, col)];
            }
        }
        for c in 0..k {
            for col in 0..d {
                centroids[(c, col)] = sums[(c, col)] / counts[c] as f64;
            }
        }

        if !changed {
            break;
        }
    }

    let mut wcss = 0.0;
    for i in 0..n {
        wcss += dist2(points, i, &centroids, labels[i]);
    }
    (labels, wcss)
}

/// Options for [`kkm_cluster_with`].
#[derive(Debug, Clone)]
pub struct KkmOptions {
    /// k-means restart count (default 50).
    pub restarts: usize,
    /// Seed for the restart streams.
    pub seed: u64,
    /// Normalize embedding rows to unit length before k-means
    /// (off by default; zero rows are left untouched).
    pub normalize_rows: bool,
}

impl Default for KkmOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            seed: 0,
            normalize_rows: false,
        }
    }
}

/// Kernel k-means: spectral embedding via [`kkm_partition`], then [`kmeans`]
/// on its rows (fed unnormalized).
pub fn kkm_cluster(
    kernel: &KernelMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    kkm_cluster_with(
        kernel,
        k,
        &KkmOptions {
            restarts,
            seed,
            normalize_rows: false,
        },
    )
}

/// [`kkm_cluster`] with explicit options.
pub fn kkm_cluster_with(
    kernel: &KernelMatrix,
    k: usize,
    opts: &KkmOptions,
) -> Result<ClusterAssignment> {
    Ok(kkm_cluster_scored(kernel, k, opts)?.assignment)
}

/// [`kkm_cluster_with`] variant that also reports the winning WCSS.
pub fn kkm_cluster_scored(
    kernel: &KernelMatrix,
    k: usize,
    opts: &KkmOptions,
) -> Result<KmeansBest> {
    let partition = kkm_partition(kernel, k)?;
    let mut h = partition.into_h();
    if opts.normalize_rows {
        for mut row in h.row_iter_mut() {
            let norm = row.norm();
            if norm > 0.0 {
                row /= norm;
            }
        }
    }
    kmeans_best(&h, k, opts.restarts, opts.seed)
}

/// Kernel k-means on the uniform average `(1/m) sum_p K_p`.
pub fn avg_kkm(ks: &KernelSet, k: usize, restarts: usize, seed: u64) -> Result<ClusterAssignment> {
    let uniform = vec![1.0 / ks.m() as f64; ks.m()];
    let averaged = combine_raw(ks, &uniform, false)?;
    kkm_cluster(&averaged, k, restarts, seed)
}

/// Result of the alternating multiple-kernel baseline.
#[derive(Debug, Clone)]
pub struct MkkmResult {
    /// Labels from k-means on the final embedding.
    pub assignment: ClusterAssignment,
    /// Simplex kernel weights (non-negative, sum to one).
    pub weights: Vec<f64>,
    /// `sum_p w_p² Tr(K_p (I - HHᵀ))` after initialization and each sweep;
    /// non-increasing within 1e-8.
    pub objective_trace: Vec<f64>,
    /// Completed sweeps.
    pub iterations: usize,
    /// Whether the relative objective change dropped below 1e-6.
    pub converged: bool,
}

/// Residual traces `t_p = Tr(K_p) - <K_p, HHᵀ>` for every kernel.
fn residual_traces(ks: &KernelSet, h: &DMatrix<f64>) -> Vec<f64> {
    let hht = h * h.transpose();
    let n = ks.n();
    ks.kernels()
        .iter()
        .map(|kernel| {
            let mut full = 0.0;
            let mut captured = 0.0;
            for i in 0..n {
                full += kernel.values()[(i, i)];
                for j in 0..n {
                    captured += kernel.values()[(i, j)] * hht[(i, j)];
                }
            }
            full - captured
        })
        .collect()
}

/// Alternating multiple-kernel k-means with squared simplex weights.
///
/// Starting from uniform `w = 1/m`, each sweep recomputes the embedding from
/// `K_w = sum_p w_p² K_p`, then sets `w_p` proportional to
/// `1 / Tr(K_p (I - HHᵀ))`. Both half-steps are exact minimizers of
/// `sum_p w_p² Tr(K_p (I - HHᵀ))`, so the recorded objective never
/// increases. Stops when its relative change falls below 1e-6 or after
/// `max_iter` sweeps; final labels come from k-means on the last embedding.
///
/// # Errors
///
/// [`Error::DegenerateKernel`] when some `Tr(K_p (I - HHᵀ)) <= 1e-14`,
/// which makes the inverse-trace weight update undefined.
pub fn mkkm(
    ks: &KernelSet,
    k: usize,
    restarts: usize,
    seed: u64,
    max_iter: usize,
) -> Result<MkkmResult> {
    if max_iter < 1 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            reason: "must be at least 1".into(),
        });
    }
    let m = ks.m();
    let mut weights = vec![1.0 / m as f64; m];

    let combined = combine_raw(ks, &weights, true)?;
    let mut h = kkm_partition(&combined, k)?.into_h();
    let mut traces = residual_traces(ks, &h);
    let mut trace = vec![mkkm_objective(&weights, &traces)];
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..max_iter {
        for (p, &t) in traces.iter().enumerate() {
            if t <= DEGENERATE_TRACE {
                return Err(Error::DegenerateKernel { index: p, value: t });
            }
        }
        let inv_sum: f64 = traces.iter().map(|t| 1.0 / t).sum();
        for (p, w) in weights.iter_mut().enumerate() {
            *w = (1.0 / traces[p]) / inv_sum;
        }

        let combined = combine_raw(ks, &weights, true)?;
        h = kkm_partition(&combined, k)?.into_h();
        traces = residual_traces(ks, &h);

        let obj = mkkm_objective(&weights, &traces);
        let prev = *trace.last().expect("trace is non-empty");
        trace.push(obj);
        iterations += 1;
        if (obj - prev).abs() / prev.abs().max(1.0) < MKKM_REL_TOL {
            converged = true;
            break;
        }
    }

    let assignment = kmeans(&h, k, restarts, seed)?;
    Ok(MkkmResult {
        assignment,
        weights,
        objective_trace: trace,
        iterations,
        converged,
    })
}

fn mkkm_objective(weights: &[f64], traces: &[f64]) -> f64 {
    weights
        .iter()
        .zip(traces)
        .map(|(w, t)| w * w * t)
        .sum()
}
