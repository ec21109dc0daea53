//! Shared fixtures for the criterion benchmarks: deterministic synthetic
//! kernel sets and random vectors, so every run measures the same inputs.

use lswmkc_core::kernel::KernelSet;
use lswmkc_core::kkm::ClusterAssignment;
use lswmkc_core::synth::{generate, SyntheticSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A well-separated multi-view dataset of `per_cluster * clusters` samples,
/// already preprocessed, with its ground-truth assignment.
pub fn clustered_fixture(
    per_cluster: usize,
    clusters: usize,
    kernels: usize,
    seed: u64,
) -> (KernelSet, ClusterAssignment) {
    let spec = SyntheticSpec {
        per_cluster,
        clusters,
        dims: clusters + 1,
        separation: 7.0,
        kernels,
        noise_kernels: 0,
        seed,
    };
    generate(&spec).expect("fixture generation is infallible for valid specs")
}

/// A dense vector with entries uniform in `(-scale, scale)`.
pub fn random_vector(len: usize, scale: f64, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(len, |_, _| rng.random_range(-scale..scale))
}

/// A dense square matrix with entries uniform in `(-scale, scale)`.
pub fn random_matrix(n: usize, scale: f64, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))
}
