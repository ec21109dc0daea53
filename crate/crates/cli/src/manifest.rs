//! Dataset manifests: a small JSON document naming the kernel files of a
//! dataset, its shape, and (optionally) ground-truth labels.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "example",
//!   "n": 150,
//!   "m": 4,
//!   "k": 3,
//!   "kernel_paths": ["kernel_0.csv", "kernel_1.csv", "kernel_2.csv", "kernel_3.csv"],
//!   "labels_path": "labels.txt"
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory. Kernel
//! files may mix the CSV and binary formats freely.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::warn;
use serde::{Deserialize, Serialize};

use lswmkc_core::{ClusterAssignment, KernelMatrix, KernelSet};

use crate::io;

/// Largest symmetry residual accepted without repair.
pub const SYMMETRY_ACCEPT: f64 = 1e-9;
/// Largest symmetry residual repaired by symmetrization (with a warning);
/// anything beyond is an error.
pub const SYMMETRY_REPAIR: f64 = 1e-6;

/// On-disk description of a multi-kernel dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    /// Schema version; currently always 1.
    pub format_version: u32,
    /// Human-readable dataset name.
    pub name: String,
    /// Sample count; every kernel must be n x n.
    pub n: usize,
    /// Kernel count; must equal `kernel_paths.len()`.
    pub m: usize,
    /// Ground-truth cluster count.
    pub k: usize,
    /// Kernel matrix files, relative to the manifest directory.
    pub kernel_paths: Vec<String>,
    /// Optional ground-truth labels file (one integer in `[0, k)` per line).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<String>,
}

impl DatasetManifest {
    /// Parses and structurally validates a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest `{}`", path.display()))?;
        let manifest: DatasetManifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest `{}`", path.display()))?;
        manifest
            .validate()
            .with_context(|| format!("manifest `{}`", path.display()))?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != 1 {
            bail!("unsupported format_version {}", self.format_version);
        }
        if self.m != self.kernel_paths.len() {
            bail!(
                "m = {} but kernel_paths lists {} files",
                self.m,
                self.kernel_paths.len()
            );
        }
        if self.m == 0 {
            bail!("kernel_paths is empty");
        }
        if self.n == 0 {
            bail!("n must be positive");
        }
        if self.k == 0 {
            bail!("k must be positive");
        }
        Ok(())
    }

    /// Writes the manifest as pretty-printed JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n")
            .with_context(|| format!("writing manifest `{}`", path.display()))
    }

    /// Resolves a manifest-relative path.
    pub fn resolve(&self, manifest_path: &Path, entry: &str) -> PathBuf {
        let candidate = Path::new(entry);
        if candidate.is_absolute() {
            candidate.to_path_buf()
        } else {
            manifest_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(candidate)
        }
    }
}

/// Loads a dataset: parses the manifest, reads every kernel (shape-checked
/// against `n`, symmetry-checked), and reads ground-truth labels when
/// present.
///
/// Symmetry policy per kernel: residual (max |K - K^T| entry) at most
/// [`SYMMETRY_ACCEPT`] is used as-is; at most [`SYMMETRY_REPAIR`] the matrix
/// is replaced by (K + K^T)/2 with a warning; anything larger is an error
/// naming the file.
pub fn load_manifest(
    path: &Path,
) -> Result<(KernelSet, Option<ClusterAssignment>, DatasetManifest)> {
    let manifest = DatasetManifest::load(path)?;
    let mut kernels = Vec::with_capacity(manifest.m);
    for entry in &manifest.kernel_paths {
        let file = manifest.resolve(path, entry);
        let raw = io::read_matrix(&file)?;
        if raw.nrows() != manifest.n || raw.ncols() != manifest.n {
            bail!(
                "kernel file `{}`: expected a {n}x{n} matrix, found {r}x{c}",
                file.display(),
                n = manifest.n,
                r = raw.nrows(),
                c = raw.ncols()
            );
        }
        let residual = symmetry_residual(&raw);
        let repaired = if residual <= SYMMETRY_ACCEPT {
            raw
        } else if residual <= SYMMETRY_REPAIR {
            warn!(
                "kernel file `{}`: symmetry residual {residual:.3e} exceeds {SYMMETRY_ACCEPT:.0e}; symmetrizing",
                file.display()
            );
            symmetrize(&raw)
        } else {
            bail!(
                "kernel file `{}`: symmetry residual {residual:.3e} exceeds the repairable bound {SYMMETRY_REPAIR:.0e}",
                file.display()
            );
        };
        let kernel = KernelMatrix::new(repaired)
            .with_context(|| format!("kernel file `{}`", file.display()))?;
        kernels.push(kernel);
    }
    let kernel_set = KernelSet::new(kernels).context("assembling the kernel set")?;

    let labels = match &manifest.labels_path {
        Some(entry) => {
            let file = manifest.resolve(path, entry);
            Some(io::read_labels(&file, manifest.n, manifest.k)?)
        }
        None => None,
    };
    Ok((kernel_set, labels, manifest))
}

/// Largest absolute difference between a matrix and its transpose.
pub fn symmetry_residual(m: &nalgebra::DMatrix<f64>) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Exactly symmetric average of a matrix and its transpose.
pub fn symmetrize(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = m.nrows();
    let mut out = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}
