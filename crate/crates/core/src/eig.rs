//! Shared dense symmetric eigendecomposition helpers.
//!
//! Accuracy contract used throughout the crate: for symmetric input `A`,
//! the factors satisfy `||A - V diag(w) Vᵀ||_F <= 1e-9 * ||A||_F`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
/// descending order (ties keep ascending original index). Returns
/// `(values, vectors)` with eigenvectors as columns, so
/// `m ≈ vectors * diag(values) * vectorsᵀ`.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let max_niter = 80 * n.max(8);
    let se = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_niter)
        .ok_or(Error::EigenFailure {
            size: n,
            max_iterations: max_niter,
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .total_cmp(&se.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let values = DVector::from_fn(n, |r, _| se.eigenvalues[order[r]]);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Frobenius-nearest positive semidefinite matrix to the symmetric part of
/// `a`: eigendecompose `(a + aᵀ)/2`, clamp negative eigenvalues to zero, and
/// recompose. The result is exactly symmetric.
pub(crate) fn eigen_clip(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (a + a.transpose()) * 0.5;
    let (values, vectors) = symmetric_eigen(&sym)?;
    let clipped = DVector::from_fn(values.len(), |i, _| values[i].max(0.0));
    let mut out = &vectors * DMatrix::from_diagonal(&clipped) * vectors.transpose();
    let n = out.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}
