//! Kernel matrices: construction, preprocessing, combination, and checks.
//!
//! A kernel is a square matrix of pairwise sample similarities. Before any
//! clustering, every base kernel is centered (the implicit feature vectors
//! get zero mean) and scaled to unit diagonal; [`preprocess_kernel`] performs
//! both steps. [`combine_weighted`] forms weighted sums of a kernel set and
//! [`check_psd`] reports the minimum eigenvalue.

use nalgebra::DMatrix;

use crate::eig;
use crate::error::{Error, Result};

/// Tolerance used when an operation requires exact symmetry.
pub(crate) const SYMMETRY_TOL: f64 = 1e-12;

/// Centered self-similarities at or below this threshold cannot be scaled.
const DEGENERATE_DIAG: f64 = 1e-14;

pub(crate) fn check_square(context: &'static str, m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            context,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn check_finite(context: &'static str, m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let value = m[(i, j)];
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    context,
                    row: i,
                    col: j,
                    value,
                });
            }
        }
    }
    Ok(())
}

/// Square matrix of pairwise similarities.
///
/// Construction checks only shape and finiteness. Operations that need
/// symmetric or positive semidefinite input say so in their documentation
/// and verify it; localized (masked) kernels are legitimately asymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    values: DMatrix<f64>,
}

impl KernelMatrix {
    /// Wraps a non-empty, square, finite matrix.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        check_square("KernelMatrix", &values)?;
        if values.nrows() == 0 {
            return Err(Error::EmptyInput {
                context: "KernelMatrix",
            });
        }
        check_finite("KernelMatrix", &values)?;
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

    /// Largest absolute difference between the matrix and its transpose.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)]).abs());
            }
        }
        worst
    }

    pub(crate) fn require_symmetric(&self, context: &'static str) -> Result<()> {
        let residual = self.symmetry_residual();
        if residual > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                context,
                residual,
                tolerance: SYMMETRY_TOL,
            });
        }
        Ok(())
    }
}

/// Non-empty collection of kernels over the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    kernels: Vec<KernelMatrix>,
}

impl KernelSet {
    /// Wraps a non-empty list of kernels that all share one sample count.
    pub fn new(kernels: Vec<KernelMatrix>) -> Result<Self> {
        let first = kernels.first().ok_or(Error::EmptyInput {
            context: "KernelSet",
        })?;
        let n = first.n();
        for kernel in &kernels {
            if kernel.n() != n {
                return Err(Error::DimensionMismatch {
                    context: "KernelSet",
                    expected: n,
                    found: kernel.n(),
                });
            }
        }
        Ok(Self { kernels })
    }

    /// Number of kernels.
    pub fn m(&self) -> usize {
        self.kernels.len()
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.kernels[0].n()
    }

    pub fn kernels(&self) -> &[KernelMatrix] {
        &self.kernels
    }

    pub fn get(&self, p: usize) -> &KernelMatrix {
        &self.kernels[p]
    }
}

/// Non-negative kernel weights with unit squared Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    values: Vec<f64>,
}

impl KernelWeights {
    /// Wraps a non-empty vector of non-negative weights with
    /// `|sum(w^2) - 1| <= 1e-12`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput {
                context: "KernelWeights",
            });
        }
        let mut norm2 = 0.0;
        for (p, &w) in values.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "weights",
                    reason: format!("weight {p} is {w}; weights must be finite and non-negative"),
                });
            }
            norm2 += w * w;
        }
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: format!("squared norm is {norm2}; must equal 1 within 1e-12"),
            });
        }
        Ok(Self { values })
    }

    /// Uniform weights `sqrt(1/m)` for `m` kernels.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyInput {
                context: "KernelWeights::uniform",
            });
        }
        Ok(Self {
            values: vec![(1.0 / m as f64).sqrt(); m],
        })
    }

    /// Number of weights.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Gaussian (RBF) kernel over feature rows:
/// `K[i,j] = exp(-||x_i - x_j||^2 / (2 * bandwidth^2))`.
///
/// The result is exactly symmetric with unit diagonal.
pub fn gaussian_kernel(features: &DMatrix<f64>, bandwidth: f64) -> Result<KernelMatrix> {
    if features.nrows() == 0 {
        return Err(Error::EmptyInput {
            context: "gaussian_kernel",
        });
    }
    check_finite("gaussian_kernel", features)?;
    if !bandwidth.is_finite() || bandwidth <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "bandwidth",
            reason: format!("got {bandwidth}; must be finite and positive"),
        });
    }

    let n = features.nrows();
    let d = features.ncols();
    let scale = -1.0 / (2.0 * bandwidth * bandwidth);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let mut dist2 = 0.0;
            for c in 0..d {
                let t = features[(i, c)] - features[(j, c)];
                dist2 += t * t;
            }
            let v = (scale * dist2).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    KernelMatrix::new(k)
}

/// Centers a kernel in feature space and scales it to unit diagonal.
///
/// Centering: `K_c = K - 11ᵀK/n - K11ᵀ/n + (1ᵀK1) 11ᵀ/n²`, i.e.
/// `K_c[i,j] = K[i,j] - mean(row i) - mean(row j) + mean(all)` for symmetric
/// input. Scaling: `K_n[i,j] = K_c[i,j] / sqrt(K_c[i,i] * K_c[j,j])`; the
/// diagonal of the result is set to exactly 1.
///
/// A matrix that is already centered (zero row sums) and unit-diagonal is a
/// fixed point of this map within 1e-12.
///
/// # Errors
///
/// [`Error::DegenerateSample`] if some centered self-similarity `K_c[i,i]`
/// is at most `1e-14` — the sample coincides with the feature-space mean and
/// cannot be scaled. [`Error::NotSymmetric`] for asymmetric input.
pub fn preprocess_kernel(kernel: &KernelMatrix) -> Result<KernelMatrix> {
    kernel.require_symmetric("preprocess_kernel")?;
    let k = kernel.values();
    let n = kernel.n();
    let nf = n as f64;

    let mut row_mean = vec![0.0_f64; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += k[(i, j)];
        }
        row_mean[i] = acc / nf;
    }
    let grand_mean = row_mean.iter().sum::<f64>() / nf;

    let mut centered = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = k[(i, j)] - row_mean[i] - row_mean[j] + grand_mean;
            centered[(i, j)] = v;
            centered[(j, i)] = v;
        }
    }

    let mut scale = vec![0.0_f64; n];
    for i in 0..n {
        let d = centered[(i, i)];
        if d <= DEGENERATE_DIAG {
            return Err(Error::DegenerateSample { index: i, value: d });
        }
        scale[i] = d.sqrt();
    }

    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let v = centered[(i, j)] / (scale[i] * scale[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    KernelMatrix::new(out)
}

/// Weighted sum of a kernel set: `sum_p w_p K_p`, or `sum_p w_p^2 K_p` when
/// `squared` is set.
pub fn combine_weighted(ks: &KernelSet, w: &KernelWeights, squared: bool) -> Result<KernelMatrix> {
    if w.m() != ks.m() {
        return Err(Error::DimensionMismatch {
            context: "combine_weighted",
            expected: ks.m(),
            found: w.m(),
        });
    }
    combine_raw(ks, w.values(), squared)
}

/// Weighted sum with unvalidated weights; shared by [`combine_weighted`] and
/// the baselines whose weight conventions differ (e.g. simplex-normalized).
pub(crate) fn combine_raw(ks: &KernelSet, w: &[f64], squared: bool) -> Result<KernelMatrix> {
    let n = ks.n();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for (p, kernel) in ks.kernels().iter().enumerate() {
        let c = if squared { w[p] * w[p] } else { w[p] };
        acc += kernel.values() * c;
    }
    KernelMatrix::new(acc)
}

/// Outcome of a positive semidefiniteness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    /// Whether `min_eigenvalue >= -tol`.
    pub is_psd: bool,
    /// Smallest eigenvalue of the matrix.
    pub min_eigenvalue: f64,
}

/// Reports whether a symmetric kernel is positive semidefinite within `tol`,
/// together with its minimum eigenvalue.
pub fn check_psd(kernel: &KernelMatrix, tol: f64) -> Result<PsdCheck> {
    kernel.require_symmetric("check_psd")?;
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("got {tol}; must be finite and non-negative"),
        });
    }
    let (values, _) = eig::symmetric_eigen(kernel.values())?;
    let min_eigenvalue = values[values.len() - 1];
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}
