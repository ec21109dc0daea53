//! Nearest-neighbor kernel localization baseline: per-row neighbor masks
//! built in average kernel space, Hadamard masking of each base kernel, and
//! a grid search over the neighbor ratio.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{combine_raw, KernelMatrix, KernelSet};
use crate::kkm::{kkm_cluster_scored, ClusterAssignment, KkmOptions};
use crate::metrics::{score_all, MetricScores};
use crate::solver::update_neighborhood_kernel;

/// Default neighbor-ratio grid: `0.1, 0.2, ..., 0.9`.
pub const DEFAULT_TAU_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Binary neighbor mask with a fixed per-row budget of `round(tau * n)`.
///
/// Every row marks itself (`N[i,i] = 1`); masks are generally asymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborMask {
    values: DMatrix<f64>,
    tau: f64,
}

impl NeighborMask {
    /// Validates entries in `{0, 1}`, a set diagonal, and exactly
    /// `round(tau * n)` ones per row.
    pub fn new(values: DMatrix<f64>, tau: f64) -> Result<Self> {
        crate::kernel::check_square("NeighborMask::new", &values)?;
        if values.nrows() == 0 {
            return Err(Error::EmptyInput {
                context: "NeighborMask::new",
            });
        }
        check_tau(tau)?;
        let n = values.nrows();
        let budget = row_budget(tau, n)?;
        for i in 0..n {
            let mut ones = 0_usize;
            for j in 0..n {
                let v = values[(i, j)];
                if v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidParameter {
                        name: "mask",
                        reason: format!("entry ({i}, {j}) is {v}; must be 0 or 1"),
                    });
                }
                if v == 1.0 {
                    ones += 1;
                }
            }
            if values[(i, i)] != 1.0 {
                return Err(Error::InvalidParameter {
                    name: "mask",
                    reason: format!("row {i} does not mark itself as a neighbor"),
                });
            }
            if ones != budget {
                return Err(Error::InvalidParameter {
                    name: "mask",
                    reason: format!(
                        "row {i} has {ones} neighbors; expected round(tau*n) = {budget}"
                    ),
                });
            }
        }
        Ok(Self { values, tau })
    }

    /// The 0/1 mask matrix.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Neighbor ratio this mask was built with.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Ones per row.
    pub fn budget(&self) -> usize {
        row_budget(self.tau, self.n()).expect("validated at construction")
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau <= 0.0 || tau > 1.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("got {tau}; must lie in (0, 1]"),
        });
    }
    Ok(())
}

fn row_budget(tau: f64, n: usize) -> Result<usize> {
    let budget = (tau * n as f64).round() as usize;
    if budget == 0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!(
                "round(tau*n) = 0 for tau = {tau}, n = {n}; every row must at least keep itself"
            ),
        });
    }
    Ok(budget.min(n))
}

/// Marks, per row, the `round(tau * n)` samples with the largest reference
/// similarity. The sample itself always ranks first (it is its own nearest
/// neighbor and counts toward the budget); remaining ties break by ascending
/// index.
pub fn build_neighbor_mask(k_ref: &KernelMatrix, tau: f64) -> Result<NeighborMask> {
    check_tau(tau)?;
    let n = k_ref.n();
    let budget = row_budget(tau, n)?;
    let mut values = DMatrix::zeros(n, n);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend(0..n);
        order.sort_by(|&a, &b| {
            // Self first, then descending similarity, then ascending index.
            (b == i)
                .cmp(&(a == i))
                .then_with(|| k_ref.values()[(i, b)].total_cmp(&k_ref.values()[(i, a)]))
                .then_with(|| a.cmp(&b))
        });
        for &j in order.iter().take(budget) {
            values[(i, j)] = 1.0;
        }
    }
    NeighborMask::new(values, tau)
}

/// Entrywise (Hadamard) product `N ⊙ K_p`. The result is generally
/// asymmetric, since the mask is.
pub fn localize_kernel(kp: &KernelMatrix, mask: &NeighborMask) -> Result<KernelMatrix> {
    if kp.n() != mask.n() {
        return Err(Error::DimensionMismatch {
            context: "localize_kernel",
            expected: mask.n(),
            found: kp.n(),
        });
    }
    KernelMatrix::new(mask.values().component_mul(kp.values()))
}

/// Uniform average of the localized kernels `(1/m) sum_p N ⊙ K_p`
/// (not yet symmetrized).
pub fn localized_average(ks: &KernelSet, mask: &NeighborMask) -> Result<KernelMatrix> {
    if ks.n() != mask.n() {
        return Err(Error::DimensionMismatch {
            context: "localized_average",
            expected: mask.n(),
            found: ks.n(),
        });
    }
    let mut acc = DMatrix::zeros(ks.n(), ks.n());
    let scale = 1.0 / ks.m() as f64;
    for kernel in ks.kernels() {
        acc += mask.values().component_mul(kernel.values()) * scale;
    }
    KernelMatrix::new(acc)
}

/// One grid point of [`knn_baseline_cluster`].
#[derive(Debug, Clone)]
pub struct TauRun {
    /// Neighbor ratio of this run.
    pub tau: f64,
    /// Labels from kernel k-means on the localized consensus.
    pub assignment: ClusterAssignment,
    /// Within-cluster sum of squares of the winning k-means restart.
    pub wcss: f64,
    /// Scores against ground truth, when labels were supplied.
    pub metrics: Option<MetricScores>,
}

/// Result of a neighbor-ratio grid search.
#[derive(Debug, Clone)]
pub struct TauSweep {
    /// Index into `runs` of the selected run.
    pub best: usize,
    /// One entry per grid value, in input order.
    pub runs: Vec<TauRun>,
}

impl TauSweep {
    /// The selected run.
    pub fn best_run(&self) -> &TauRun {
        &self.runs[self.best]
    }
}

/// Localized-kernel clustering over a neighbor-ratio grid.
///
/// Per grid value: build the mask on the uniform-average kernel, localize
/// every base kernel, average, symmetrize and PSD-clip, then run kernel
/// k-means. Selects the highest-accuracy run when ground-truth `labels` are
/// given, else the lowest-WCSS run; ties keep the earliest grid entry.
pub fn knn_baseline_cluster(
    ks: &KernelSet,
    k: usize,
    tau_grid: &[f64],
    restarts: usize,
    seed: u64,
    labels: Option<&ClusterAssignment>,
) -> Result<TauSweep> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyInput {
            context: "knn_baseline_cluster",
        });
    }
    let uniform = vec![1.0 / ks.m() as f64; ks.m()];
    let reference = combine_raw(ks, &uniform, false)?;

    let mut runs = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let mask = build_neighbor_mask(&reference, tau)?;
        let averaged = localized_average(ks, &mask)?;
        let consensus = update_neighborhood_kernel(averaged.values())?;
        let opts = KkmOptions {
            restarts,
            seed,
            normalize_rows: false,
        };
        let scored = kkm_cluster_scored(&consensus, k, &opts)?;
        let metrics = match labels {
            Some(truth) => Some(score_all(&scored.assignment, truth)?),
            None => None,
        };
        runs.push(TauRun {
            tau,
            assignment: scored.assignment,
            wcss: scored.wcss,
            metrics,
        });
    }

    let mut best = 0;
    for (idx, run) in runs.iter().enumerate().skip(1) {
        let better = match labels {
            Some(_) => {
                run.metrics.as_ref().expect("metrics computed").acc
                    > runs[best].metrics.as_ref().expect("metrics computed").acc
            }
            None => run.wcss < runs[best].wcss,
        };
        if better {
            best = idx;
        }
    }
    Ok(TauSweep { best, runs })
}
