//! Row-wise affinity-graph machinery: target-vector assembly, the simplex
//! projection that solves each row subproblem in closed form, and the
//! closed-form initialization of the graph and its per-row regularizers.
//!
//! Each row `i` of the affinity graph solves
//! `min_z (alpha + gamma_i) ||z||^2 + e_i . z` subject to `z >= 0`,
//! `sum(z) = 1`, `z[i] = 0`, whose solution is the Euclidean projection of
//! `zhat = -e_i / (2 (alpha + gamma_i))` onto the simplex over the non-self
//! entries.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::{check_finite, check_square, KernelMatrix, KernelSet, KernelWeights};

/// Convergence tolerance on `|sum(z) - 1|` for the projection root finder.
const PROJECTION_TOL: f64 = 1e-12;
/// Iteration cap for the projection root finder.
const PROJECTION_MAX_ITER: usize = 100;
/// Denominators below this indicate fully tied neighbor similarities.
const INIT_DEGENERATE_DENOM: f64 = 1e-12;
/// Floor applied to the per-row regularizer in the degenerate tie case.
const GAMMA_FLOOR: f64 = 1e-10;

/// Non-negative, row-stochastic affinity graph with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    values: DMatrix<f64>,
}

impl AffinityGraph {
    /// Wraps a square matrix after checking: finite entries, `Z[i,j] >= 0`,
    /// `Z[i,i] = 0` exactly, and row sums equal to 1 within `1e-9`.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        check_square("AffinityGraph", &values)?;
        check_finite("AffinityGraph", &values)?;
        let n = values.nrows();
        if n == 0 {
            return Err(Error::EmptyInput {
                context: "AffinityGraph",
            });
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter {
                    name: "values",
                    reason: format!("diagonal entry ({i},{i}) is {}; must be exactly 0", values[(i, i)]),
                });
            }
            let mut row_sum = 0.0;
            for j in 0..n {
                let v = values[(i, j)];
                if v < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "values",
                        reason: format!("entry ({i},{j}) is {v}; must be non-negative"),
                    });
                }
                row_sum += v;
            }
            if (row_sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "values",
                    reason: format!("row {i} sums to {row_sum}; must be 1 within 1e-9"),
                });
            }
        }
        Ok(Self { values })
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }
}

/// Positive per-row regularization weights, fixed at initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaVector {
    values: DVector<f64>,
}

impl GammaVector {
    /// Wraps a non-empty vector of strictly positive, finite entries.
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput {
                context: "GammaVector",
            });
        }
        for (i, &g) in values.iter().enumerate() {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "gamma",
                    reason: format!("entry {i} is {g}; must be finite and positive"),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// Linear-term vector of one row subproblem, `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowTarget {
    row: usize,
    values: DVector<f64>,
}

impl RowTarget {
    /// Index of the row this target belongs to.
    pub fn row(&self) -> usize {
        self.row
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }
}

/// Assembles the linear term of row `i`'s subproblem:
/// `e_i[j] = -(2 alpha K*[i,j] + sum_p w_p K_p[i,j])`.
pub fn assemble_row_target(
    row: usize,
    ks: &KernelSet,
    w: &KernelWeights,
    kstar: &KernelMatrix,
    alpha: f64,
) -> Result<RowTarget> {
    let n = ks.n();
    if row >= n {
        return Err(Error::InvalidParameter {
            name: "row",
            reason: format!("row {row} out of range for {n} samples"),
        });
    }
    if w.m() != ks.m() {
        return Err(Error::DimensionMismatch {
            context: "assemble_row_target",
            expected: ks.m(),
            found: w.m(),
        });
    }
    if kstar.n() != n {
        return Err(Error::DimensionMismatch {
            context: "assemble_row_target",
            expected: n,
            found: kstar.n(),
        });
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("got {alpha}; must be finite and non-negative"),
        });
    }

    let mut e = DVector::zeros(n);
    for j in 0..n {
        let mut combined = 2.0 * alpha * kstar.values()[(row, j)];
        for (p, kernel) in ks.kernels().iter().enumerate() {
            combined += w.values()[p] * kernel.values()[(row, j)];
        }
        e[j] = -combined;
    }
    Ok(RowTarget { row, values: e })
}

/// Euclidean projection of `zhat` onto the probability simplex over the
/// non-self entries: returns `z` with `z[j] = max(zhat[j] + beta, 0)` for
/// `j != self_index`, `z[self_index] = 0`, and `sum(z) = 1` within 1e-10.
///
/// `beta` is the unique root of the monotone piecewise-linear equation
/// `sum_{j != self} max(zhat[j] + beta, 0) = 1`, found by safeguarded Newton
/// iteration with bisection fallback (tolerance `1e-12` on the sum residual,
/// at most 100 iterations).
pub fn project_row_simplex(zhat: &DVector<f64>, self_index: usize) -> Result<DVector<f64>> {
    let n = zhat.len();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "zhat",
            reason: format!("need at least 2 entries to project, got {n}"),
        });
    }
    if self_index >= n {
        return Err(Error::InvalidParameter {
            name: "self_index",
            reason: format!("index {self_index} out of range for {n} entries"),
        });
    }
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for (j, &v) in zhat.iter().enumerate() {
        if j == self_index {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "project_row_simplex",
                row: j,
                col: 0,
                value: v,
            });
        }
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }

    // Bracket: at `lo` every active term is at most 1/(n-1), so f(lo) <= 0;
    // at `hi` every term is at least 1/(n-1), so f(hi) >= 0.
    let spread = 1.0 / (n - 1) as f64;
    let mut lo = spread - vmax;
    let mut hi = spread - vmin;

    let evaluate = |beta: f64| -> (f64, f64) {
        let mut sum = 0.0;
        let mut active = 0.0;
        for (j, &v) in zhat.iter().enumerate() {
            if j == self_index {
                continue;
            }
            let t = v + beta;
            if t > 0.0 {
                sum += t;
                active += 1.0;
            }
        }
        (sum - 1.0, active)
    };

    let mut beta = 0.5 * (lo + hi);
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..PROJECTION_MAX_ITER {
        let (f, slope) = evaluate(beta);
        residual = f.abs();
        if residual <= PROJECTION_TOL {
            converged = true;
            break;
        }
        if f > 0.0 {
            hi = beta;
        } else {
            lo = beta;
        }
        let newton = if slope > 0.0 { beta - f / slope } else { f64::NAN };
        beta = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if !converged {
        return Err(Error::ProjectionNoConvergence {
            row: self_index,
            residual,
            tolerance: PROJECTION_TOL,
            max_iterations: PROJECTION_MAX_ITER,
        });
    }

    let mut z = DVector::zeros(n);
    for (j, &v) in zhat.iter().enumerate() {
        if j != self_index {
            z[j] = (v + beta).max(0.0);
        }
    }
    Ok(z)
}

/// Solves row `i`'s subproblem for the given regularizer: projects
/// `zhat = -e_i / (2 (alpha + gamma_i))` onto the non-self simplex.
pub fn update_row(
    row: usize,
    ks: &KernelSet,
    w: &KernelWeights,
    kstar: &KernelMatrix,
    alpha: f64,
    gamma_i: f64,
) -> Result<DVector<f64>> {
    let denom = 2.0 * (alpha + gamma_i);
    if !denom.is_finite() || denom <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma_i",
            reason: format!("alpha + gamma_i = {}; must be positive", alpha + gamma_i),
        });
    }
    let target = assemble_row_target(row, ks, w, kstar, alpha)?;
    let zhat = target.values() * (-1.0 / denom);
    project_row_simplex(&zhat, row)
}

/// Closed-form initialization of the affinity graph and per-row regularizers.
///
/// Row targets are assembled with `alpha = 0` and uniform weights
/// `sqrt(1/m)`. Per row, the non-self entries of `e_i` are sorted ascending
/// (stable, ties by ascending sample index; the self entry is always the one
/// excluded). With `v_t` denoting the `t`-th sorted value (0-based):
///
/// * `gamma_i = (c/2) v_c - (1/2) sum_{t<c} v_t`,
/// * `z[neighbor t] = (v_c - v_t) / (c v_c - sum_{t<c} v_t)` for `t < c`,
///
/// giving exactly `c` nonzero entries that sum to 1. When the denominator
/// falls below `1e-12` (fully tied neighbors) the row falls back to uniform
/// `1/c` over the `c` nearest neighbors and `gamma_i` is floored at `1e-10`.
pub fn init_graph_and_gamma(ks: &KernelSet, c: usize) -> Result<(AffinityGraph, GammaVector)> {
    let n = ks.n();
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "ks",
            reason: format!("need at least 3 samples to initialize, got {n}"),
        });
    }
    if c < 1 || c > n - 2 {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("neighbor count {c} outside valid range [1, {}]", n - 2),
        });
    }

    // e rows with alpha = 0 and uniform weights: e_i = -sum_p sqrt(1/m) K_p[i,:].
    let w = KernelWeights::uniform(ks.m())?;
    let combined = crate::kernel::combine_raw(ks, w.values(), false)?;

    let mut z = DMatrix::zeros(n, n);
    let mut gamma = DVector::zeros(n);
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        let e = |j: usize| -combined.values()[(i, j)];
        order.sort_by(|&a, &b| e(a).total_cmp(&e(b)).then(a.cmp(&b)));

        let values: Vec<f64> = order.iter().map(|&j| e(j)).collect();
        let head_sum: f64 = values[..c].iter().sum();
        let denom = c as f64 * values[c] - head_sum;
        if denom < INIT_DEGENERATE_DENOM {
            for &j in &order[..c] {
                z[(i, j)] = 1.0 / c as f64;
            }
            gamma[i] = (denom / 2.0).max(GAMMA_FLOOR);
        } else {
            for (t, &j) in order[..c].iter().enumerate() {
                z[(i, j)] = (values[c] - values[t]) / denom;
            }
            gamma[i] = denom / 2.0;
        }
    }

    Ok((AffinityGraph::new(z)?, GammaVector::new(gamma)?))
}
