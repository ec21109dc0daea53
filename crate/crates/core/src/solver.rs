//! Alternating optimization of kernel weights, the consensus affinity graph,
//! and the neighborhood kernel.
//!
//! The minimized objective is
//!
//! ```text
//! -Tr(sum_p w_p K_p Zᵀ) + sum_i gamma_i ||Z[i,:]||²  + alpha ||K* - Z||_F²
//! ```
//!
//! over row-stochastic non-negative `Z` (zero diagonal), non-negative `w`
//! with unit squared norm, and symmetric PSD `K*`. Each of the three block
//! updates is an exact minimizer, so the objective never increases; the
//! per-row regularizers `gamma` are fixed by the closed-form initialization
//! and never updated.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{init_graph_and_gamma, update_row, AffinityGraph, GammaVector};
use crate::kernel::{check_psd, combine_weighted, KernelMatrix, KernelSet, KernelWeights};
use crate::kkm::{kkm_cluster, ClusterAssignment};
use crate::metrics::{score_all, MetricScores};
use crate::eig;

/// Alignments below this threshold count as vanished in the weight update.
const ALIGNMENT_EPS: f64 = 1e-14;

/// Default hyper-parameter grid: `2^0, 2^1, ..., 2^10`.
pub const DEFAULT_ALPHA_GRID: [f64; 11] = [
    1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0,
];

/// Configuration of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Balance weight of the neighborhood-kernel fitting term (>= 0).
    pub alpha: f64,
    /// Neighbor count used by the closed-form initialization (in `[1, n-2]`).
    pub neighbors: usize,
    /// Cluster count for downstream partitioning (in `[2, n]`).
    pub clusters: usize,
    /// Maximum number of alternating sweeps (>= 1).
    pub max_iter: usize,
    /// Relative objective-change threshold declaring convergence (> 0).
    pub rel_tol: f64,
    /// Seed for downstream k-means; the solver itself is deterministic.
    pub seed: u64,
}

impl SolverConfig {
    /// Defaults: `alpha = 1`, `neighbors = 5`, `max_iter = 50`,
    /// `rel_tol = 1e-6`, `seed = 0`.
    pub fn new(clusters: usize) -> Self {
        Self {
            alpha: 1.0,
            neighbors: 5,
            clusters,
            max_iter: 50,
            rel_tol: 1e-6,
            seed: 0,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("got {}; must be finite and non-negative", self.alpha),
            });
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be at least 1".into(),
            });
        }
        if !self.rel_tol.is_finite() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                reason: format!("got {}; must be finite and positive", self.rel_tol),
            });
        }
        if n < 3 || self.neighbors < 1 || self.neighbors > n - 2 {
            return Err(Error::InvalidParameter {
                name: "neighbors",
                reason: format!(
                    "neighbor count {} outside valid range [1, {}] for {} samples",
                    self.neighbors,
                    n.saturating_sub(2),
                    n
                ),
            });
        }
        if self.clusters < 2 || self.clusters > n {
            return Err(Error::InvalidParameter {
                name: "clusters",
                reason: format!("cluster count {} outside valid range [2, {n}]", self.clusters),
            });
        }
        Ok(())
    }
}

/// Final state of a solver run.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Learned kernel weights.
    pub omega: KernelWeights,
    /// Learned consensus affinity graph.
    pub graph: AffinityGraph,
    /// Learned neighborhood kernel (symmetric PSD).
    pub kstar: KernelMatrix,
    /// Per-row regularizers fixed at initialization.
    pub gamma: GammaVector,
    /// Objective value after initialization and after each sweep;
    /// non-increasing within 1e-8.
    pub objective_trace: Vec<f64>,
    /// Number of completed sweeps.
    pub iterations: usize,
    /// Whether the relative objective change dropped below `rel_tol`.
    pub converged: bool,
}

impl SolverState {
    /// Final objective value.
    pub fn final_objective(&self) -> f64 {
        *self
            .objective_trace
            .last()
            .expect("trace always holds the initial objective")
    }
}

/// Closed-form weight update: `w_p = d_p / sqrt(sum_q d_q²)` where
/// `d_p = Tr(K_p Zᵀ)`, with negative alignments clamped to zero first.
///
/// # Errors
///
/// [`Error::DegenerateAlignment`] when every clamped alignment is below
/// `1e-14`, which leaves no feasible ascent direction.
pub fn update_weights(ks: &KernelSet, z: &AffinityGraph) -> Result<KernelWeights> {
    if z.n() != ks.n() {
        return Err(Error::DimensionMismatch {
            context: "update_weights",
            expected: ks.n(),
            found: z.n(),
        });
    }
    let n = ks.n();
    let mut clamped = Vec::with_capacity(ks.m());
    for kernel in ks.kernels() {
        let mut alignment = 0.0;
        for i in 0..n {
            for j in 0..n {
                alignment += kernel.values()[(i, j)] * z.values()[(i, j)];
            }
        }
        clamped.push(alignment.max(0.0));
    }
    if clamped.iter().all(|&d| d < ALIGNMENT_EPS) {
        return Err(Error::DegenerateAlignment);
    }
    let norm = clamped.iter().map(|d| d * d).sum::<f64>().sqrt();
    KernelWeights::new(clamped.into_iter().map(|d| d / norm).collect())
}

/// Updates every row of the affinity graph via its exact per-row minimizer.
/// Rows are independent and processed in parallel; results are deterministic.
pub fn update_graph(
    ks: &KernelSet,
    w: &KernelWeights,
    kstar: &KernelMatrix,
    alpha: f64,
    gamma: &GammaVector,
) -> Result<AffinityGraph> {
    let n = ks.n();
    if gamma.len() != n {
        return Err(Error::DimensionMismatch {
            context: "update_graph",
            expected: n,
            found: gamma.len(),
        });
    }
    let rows: Vec<DVector<f64>> = (0..n)
        .into_par_iter()
        .map(|i| update_row(i, ks, w, kstar, alpha, gamma.get(i)))
        .collect::<Result<_>>()?;
    let z = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    AffinityGraph::new(z)
}

/// Projects a graph onto the symmetric PSD cone: symmetrizes
/// `A = (Z + Zᵀ)/2`, eigendecomposes, clamps negative eigenvalues to zero,
/// and recomposes. The result is the Frobenius-nearest PSD matrix to `A`.
pub fn update_neighborhood_kernel(z: &DMatrix<f64>) -> Result<KernelMatrix> {
    crate::kernel::check_square("update_neighborhood_kernel", z)?;
    crate::kernel::check_finite("update_neighborhood_kernel", z)?;
    if z.nrows() == 0 {
        return Err(Error::EmptyInput {
            context: "update_neighborhood_kernel",
        });
    }
    KernelMatrix::new(eig::eigen_clip(z)?)
}

/// Evaluates the solver objective
/// `-Tr(sum_p w_p K_p Zᵀ) + sum_i gamma_i ||Z[i,:]||² + alpha ||K* - Z||_F²`.
///
/// `z` is accepted as a raw matrix so that infeasible probes can be scored.
pub fn objective(
    ks: &KernelSet,
    w: &KernelWeights,
    z: &DMatrix<f64>,
    kstar: &KernelMatrix,
    alpha: f64,
    gamma: &GammaVector,
) -> Result<f64> {
    let n = ks.n();
    crate::kernel::check_square("objective", z)?;
    crate::kernel::check_finite("objective", z)?;
    if z.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "objective",
            expected: n,
            found: z.nrows(),
        });
    }
    if w.m() != ks.m() {
        return Err(Error::DimensionMismatch {
            context: "objective",
            expected: ks.m(),
            found: w.m(),
        });
    }
    if kstar.n() != n {
        return Err(Error::DimensionMismatch {
            context: "objective",
            expected: n,
            found: kstar.n(),
        });
    }
    if gamma.len() != n {
        return Err(Error::DimensionMismatch {
            context: "objective",
            expected: n,
            found: gamma.len(),
        });
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("got {alpha}; must be finite and non-negative"),
        });
    }

    let mut alignment = 0.0;
    for (p, kernel) in ks.kernels().iter().enumerate() {
        let mut inner = 0.0;
        for i in 0..n {
            for j in 0..n {
                inner += kernel.values()[(i, j)] * z[(i, j)];
            }
        }
        alignment += w.values()[p] * inner;
    }

    let mut regularizer = 0.0;
    for i in 0..n {
        let mut row_norm2 = 0.0;
        for j in 0..n {
            row_norm2 += z[(i, j)] * z[(i, j)];
        }
        regularizer += gamma.get(i) * row_norm2;
    }

    let mut fit = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = kstar.values()[(i, j)] - z[(i, j)];
            fit += d * d;
        }
    }

    Ok(-alignment + regularizer + alpha * fit)
}

/// Runs the full alternating optimization.
///
/// Initialization: uniform weights `sqrt(1/m)`, `K* = sum_p w_p K_p`, and
/// the closed-form `(Z, gamma)`. Each sweep then updates weights, graph, and
/// neighborhood kernel in that order and records the objective. The loop
/// stops when `|obj_t - obj_{t-1}| / max(|obj_{t-1}|, 1) < rel_tol` or after
/// `max_iter` sweeps; running out of sweeps is reported via the `converged`
/// flag, not an error. The final `K*` is certified symmetric PSD
/// (`min eigenvalue >= -1e-8`).
pub fn solve(ks: &KernelSet, cfg: &SolverConfig) -> Result<SolverState> {
    cfg.validate(ks.n())?;

    let mut omega = KernelWeights::uniform(ks.m())?;
    let (mut graph, gamma) = init_graph_and_gamma(ks, cfg.neighbors)?;
    let mut kstar = combine_weighted(ks, &omega, false)?;

    let mut trace = vec![objective(ks, &omega, graph.values(), &kstar, cfg.alpha, &gamma)?];
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        omega = update_weights(ks, &graph)?;
        graph = update_graph(ks, &omega, &kstar, cfg.alpha, &gamma)?;
        kstar = update_neighborhood_kernel(graph.values())?;
        let obj = objective(ks, &omega, graph.values(), &kstar, cfg.alpha, &gamma)?;
        let prev = *trace.last().expect("trace is non-empty");
        trace.push(obj);
        iterations += 1;
        if (obj - prev).abs() / prev.abs().max(1.0) < cfg.rel_tol {
            converged = true;
            break;
        }
    }

    let report = check_psd(&kstar, 1e-8)?;
    if !report.is_psd {
        return Err(Error::NotPositiveSemidefinite {
            context: "solve",
            min_eigenvalue: report.min_eigenvalue,
        });
    }

    Ok(SolverState {
        omega,
        graph,
        kstar,
        gamma,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// One grid point of [`grid_search_alpha`].
#[derive(Debug, Clone)]
pub struct AlphaRun {
    /// Hyper-parameter value of this run.
    pub alpha: f64,
    /// Converged (or iteration-capped) solver state.
    pub state: SolverState,
    /// Labels from kernel k-means on the learned neighborhood kernel.
    pub assignment: ClusterAssignment,
    /// Scores against ground truth, when labels were supplied.
    pub metrics: Option<MetricScores>,
}

/// Result of a hyper-parameter sweep.
#[derive(Debug, Clone)]
pub struct AlphaSweep {
    /// Index into `runs` of the selected run.
    pub best: usize,
    /// One entry per grid value, in input order.
    pub runs: Vec<AlphaRun>,
}

impl AlphaSweep {
    /// The selected run.
    pub fn best_run(&self) -> &AlphaRun {
        &self.runs[self.best]
    }
}

/// Runs [`solve`] once per grid value, clusters each learned kernel with
/// kernel k-means (`restarts` restarts), and selects the best run: highest
/// accuracy when ground-truth `labels` are given (the best-result reporting
/// protocol), lowest final objective otherwise. Ties keep the earliest grid
/// entry.
pub fn grid_search_alpha(
    ks: &KernelSet,
    cfg_base: &SolverConfig,
    alphas: &[f64],
    labels: Option<&ClusterAssignment>,
    restarts: usize,
) -> Result<AlphaSweep> {
    if alphas.is_empty() {
        return Err(Error::EmptyInput {
            context: "grid_search_alpha",
        });
    }
    let mut runs = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let cfg = SolverConfig {
            alpha,
            ..cfg_base.clone()
        };
        let state = solve(ks, &cfg)?;
        let assignment = kkm_cluster(&state.kstar, cfg.clusters, restarts, cfg.seed)?;
        let metrics = match labels {
            Some(truth) => Some(score_all(&assignment, truth)?),
            None => None,
        };
        runs.push(AlphaRun {
            alpha,
            state,
            assignment,
            metrics,
        });
    }

    let mut best = 0;
    for (idx, run) in runs.iter().enumerate().skip(1) {
        let better = match labels {
            Some(_) => {
                let acc = run.metrics.as_ref().expect("metrics computed with labels").acc;
                let best_acc = runs[best].metrics.as_ref().expect("metrics computed").acc;
                acc > best_acc
            }
            None => run.state.final_objective() < runs[best].state.final_objective(),
        };
        if better {
            best = idx;
        }
    }
    Ok(AlphaSweep { best, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian_kernel;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn swap_graph(n: usize) -> AffinityGraph {
        // Ring permutation graph: row i puts all mass on (i+1) mod n.
        let mut z = DMatrix::zeros(n, n);
        for i in 0..n {
            z[(i, (i + 1) % n)] = 1.0;
        }
        AffinityGraph::new(z).unwrap()
    }

    #[test]
    fn weights_match_hand_worked_alignments() {
        // Z = [[0,1],[1,0]]; off-diagonal sums: K1 -> 3, K2 -> 4.
        let k1 = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 1.5, 1.0])).unwrap();
        let k2 = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).unwrap();
        let ks = KernelSet::new(vec![k1, k2]).unwrap();
        let w = update_weights(&ks, &swap_graph(2)).unwrap();
        assert_relative_eq!(w.values()[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(w.values()[1], 0.8, epsilon = 1e-12);
    }

    #[test]
    fn weights_uniform_for_equal_alignments_and_unit_for_single() {
        let k = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.7, 0.7, 1.0])).unwrap();
        let ks3 = KernelSet::new(vec![k.clone(), k.clone(), k.clone()]).unwrap();
        let w = update_weights(&ks3, &swap_graph(2)).unwrap();
        for p in 0..3 {
            assert_relative_eq!(w.values()[p], (1.0_f64 / 3.0).sqrt(), epsilon = 1e-12);
        }
        let ks1 = KernelSet::new(vec![k]).unwrap();
        let w1 = update_weights(&ks1, &swap_graph(2)).unwrap();
        assert_relative_eq!(w1.values()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_reject_all_non_positive_alignments() {
        let k = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0])).unwrap();
        let ks = KernelSet::new(vec![k]).unwrap();
        assert!(matches!(
            update_weights(&ks, &swap_graph(2)),
            Err(Error::DegenerateAlignment)
        ));
    }

    #[test]
    fn weights_clamp_negative_alignment_to_zero() {
        let neg = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0])).unwrap();
        let pos = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        let ks = KernelSet::new(vec![neg, pos]).unwrap();
        let w = update_weights(&ks, &swap_graph(2)).unwrap();
        assert_eq!(w.values()[0], 0.0);
        assert_relative_eq!(w.values()[1], 1.0, epsilon = 1e-15);
    }

    fn equal_similarity_inputs() -> (KernelSet, KernelWeights, KernelMatrix, GammaVector) {
        let k = KernelMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0],
        ))
        .unwrap();
        let kstar = k.clone();
        let ks = KernelSet::new(vec![k]).unwrap();
        let w = KernelWeights::new(vec![1.0]).unwrap();
        let gamma = GammaVector::new(nalgebra::dvector![0.4, 0.4, 0.4]).unwrap();
        (ks, w, kstar, gamma)
    }

    #[test]
    fn graph_update_uniform_under_symmetric_inputs() {
        let (ks, w, kstar, gamma) = equal_similarity_inputs();
        let z = update_graph(&ks, &w, &kstar, 1.0, &gamma).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.0 } else { 0.5 };
                assert_relative_eq!(z.values()[(i, j)], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn graph_update_is_deterministic() {
        let (ks, w, kstar, gamma) = equal_similarity_inputs();
        let a = update_graph(&ks, &w, &kstar, 2.0, &gamma).unwrap();
        let b = update_graph(&ks, &w, &kstar, 2.0, &gamma).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn neighborhood_kernel_fixes_psd_input() {
        let psd = DMatrix::from_row_slice(2, 2, &[0.6, 0.4, 0.4, 0.6]);
        let out = update_neighborhood_kernel(&psd).unwrap();
        assert!((out.values() - &psd).norm() < 1e-10);
    }

    #[test]
    fn neighborhood_kernel_matches_hand_worked_clip() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0]);
        let out = update_neighborhood_kernel(&a).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.5, -1.5, -1.5, 1.5]);
        assert!((out.values() - expected).norm() < 1e-12);
    }

    #[test]
    fn neighborhood_kernel_of_zero_is_zero() {
        let out = update_neighborhood_kernel(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(out.values().amax(), 0.0);
    }

    #[test]
    fn objective_matches_hand_worked_instance() {
        let k1 = KernelMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        let ks = KernelSet::new(vec![k1]).unwrap();
        let w = KernelWeights::new(vec![1.0]).unwrap();
        let z = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let kstar = KernelMatrix::new(z.clone()).unwrap();
        let gamma = GammaVector::new(nalgebra::dvector![1.0, 1.0]).unwrap();
        let obj = objective(&ks, &w, &z, &kstar, 2.0, &gamma).unwrap();
        assert_relative_eq!(obj, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn objective_third_term_vanishes_when_kstar_equals_graph() {
        let (ks, w, _, gamma) = equal_similarity_inputs();
        let z = swap_graph(3);
        let kstar = KernelMatrix::new(z.values().clone()).unwrap();
        let with_alpha = objective(&ks, &w, z.values(), &kstar, 123.0, &gamma).unwrap();
        let without_alpha = objective(&ks, &w, z.values(), &kstar, 0.0, &gamma).unwrap();
        assert_relative_eq!(with_alpha, without_alpha, epsilon = 1e-12);
    }

    #[test]
    fn objective_of_zero_graph_is_fit_term_only() {
        let (ks, w, kstar, gamma) = equal_similarity_inputs();
        let z = DMatrix::zeros(3, 3);
        let obj = objective(&ks, &w, &z, &kstar, 2.0, &gamma).unwrap();
        assert_relative_eq!(obj, 2.0 * kstar.values().norm_squared(), epsilon = 1e-12);
    }

    fn random_kernel_set(n: usize, m: usize, seed: u64) -> KernelSet {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut kernels = Vec::new();
        for p in 0..m {
            let x = DMatrix::from_fn(n, 3, |_, _| rng.random_range(-2.0..2.0));
            let k = gaussian_kernel(&x, 0.8 + 0.4 * p as f64).unwrap();
            kernels.push(crate::kernel::preprocess_kernel(&k).unwrap());
        }
        KernelSet::new(kernels).unwrap()
    }

    #[test]
    fn solve_trace_is_non_increasing_and_deterministic() {
        let ks = random_kernel_set(24, 3, 11);
        let mut cfg = SolverConfig::new(3);
        cfg.alpha = 4.0;
        let state = solve(&ks, &cfg).unwrap();
        for pair in state.objective_trace.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-8,
                "objective increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
        let again = solve(&ks, &cfg).unwrap();
        assert_eq!(state.objective_trace, again.objective_trace);
        assert_eq!(state.graph.values(), again.graph.values());
    }

    #[test]
    fn solve_identical_kernels_keep_uniform_weights() {
        let base = random_kernel_set(15, 1, 3);
        let k = base.get(0).clone();
        let ks = KernelSet::new(vec![k.clone(), k]).unwrap();
        let cfg = SolverConfig {
            neighbors: 4,
            ..SolverConfig::new(2)
        };
        let state = solve(&ks, &cfg).unwrap();
        let half = (0.5_f64).sqrt();
        assert_relative_eq!(state.omega.values()[0], half, epsilon = 1e-12);
        assert_relative_eq!(state.omega.values()[1], half, epsilon = 1e-12);
    }

    #[test]
    fn solve_recovers_perfect_two_block_affinity() {
        // Two blocks of ones, preprocessed: within-block similarity 1,
        // cross-block -1. The learned graph concentrates its row mass within
        // blocks (a little leaks across through the PSD-clipped fit term),
        // and clustering the learned kernel recovers the blocks exactly.
        let n = 8;
        let mut raw = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if (i < 4) == (j < 4) {
                    raw[(i, j)] = 1.0;
                }
            }
        }
        let k = crate::kernel::preprocess_kernel(&KernelMatrix::new(raw).unwrap()).unwrap();
        let ks = KernelSet::new(vec![k]).unwrap();
        let cfg = SolverConfig {
            alpha: 1.0,
            neighbors: 3,
            ..SolverConfig::new(2)
        };
        let state = solve(&ks, &cfg).unwrap();
        assert!(state.converged);
        for i in 0..n {
            let within: f64 = (0..n)
                .filter(|&j| (i < 4) == (j < 4))
                .map(|j| state.graph.values()[(i, j)])
                .sum();
            assert!(within > 0.9, "row {i} keeps only {within} within its block");
        }
        let labels = kkm_cluster(&state.kstar, 2, 10, 0).unwrap();
        assert_eq!(labels.labels()[0..4], [labels.labels()[0]; 4]);
        assert_eq!(labels.labels()[4..8], [labels.labels()[4]; 4]);
        assert_ne!(labels.labels()[0], labels.labels()[4]);
    }

    #[test]
    fn solve_certifies_neighborhood_kernel_psd() {
        let ks = random_kernel_set(18, 2, 5);
        let state = solve(&ks, &SolverConfig::new(3)).unwrap();
        let report = check_psd(&state.kstar, 1e-8).unwrap();
        assert!(report.is_psd);
        assert_eq!(state.kstar.symmetry_residual(), 0.0);
    }

    #[test]
    fn solve_respects_iteration_cap_without_error() {
        let ks = random_kernel_set(20, 2, 9);
        let cfg = SolverConfig {
            max_iter: 1,
            rel_tol: 1e-30,
            ..SolverConfig::new(2)
        };
        let state = solve(&ks, &cfg).unwrap();
        assert_eq!(state.iterations, 1);
        assert!(!state.converged);
        assert_eq!(state.objective_trace.len(), 2);
    }

    #[test]
    fn grid_search_single_alpha_equals_solve() {
        let ks = random_kernel_set(16, 2, 21);
        let cfg = SolverConfig::new(2);
        let sweep = grid_search_alpha(&ks, &cfg, &[4.0], None, 5).unwrap();
        let direct = solve(
            &ks,
            &SolverConfig {
                alpha: 4.0,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(sweep.runs.len(), 1);
        assert_eq!(sweep.best, 0);
        assert_eq!(
            sweep.best_run().state.objective_trace,
            direct.objective_trace
        );
    }

    #[test]
    fn grid_search_duplicate_alphas_give_identical_states() {
        let ks = random_kernel_set(14, 2, 2);
        let cfg = SolverConfig::new(2);
        let sweep = grid_search_alpha(&ks, &cfg, &[2.0, 2.0], None, 3).unwrap();
        assert_eq!(
            sweep.runs[0].state.objective_trace,
            sweep.runs[1].state.objective_trace
        );
        assert_eq!(
            sweep.runs[0].assignment.labels(),
            sweep.runs[1].assignment.labels()
        );
        assert_eq!(sweep.best, 0, "ties keep the earliest grid entry");
    }

    #[test]
    fn grid_search_rejects_empty_grid() {
        let ks = random_kernel_set(12, 2, 2);
        assert!(matches!(
            grid_search_alpha(&ks, &SolverConfig::new(2), &[], None, 3),
            Err(Error::EmptyInput { .. })
        ));
    }

    #[test]
    fn default_grid_is_powers_of_two() {
        assert_eq!(DEFAULT_ALPHA_GRID.len(), 11);
        for (e, &v) in DEFAULT_ALPHA_GRID.iter().enumerate() {
            assert_eq!(v, (2.0_f64).powi(e as i32));
        }
    }
}
