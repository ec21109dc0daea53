//! Run-result documents: the JSON artifact every clustering run produces.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "algorithm": "lswmkc",
//!   "parameters": {
//!     "alpha": 4.0, "c": 5, "tau": null, "k": 3,
//!     "restarts": 50, "seed": 1, "max_iter": 50, "rel_tol": 1e-6
//!   },
//!   "labels": [0, 0, 1, 2],
//!   "metrics": { "acc": 1.0, "nmi": 1.0, "purity": 1.0, "ari": 1.0, "ari_degenerate": false },
//!   "objective_trace": [-3.2, -3.4, -3.41],
//!   "converged": true,
//!   "iterations": 7,
//!   "runtime_ms": 12
//! }
//! ```
//!
//! Parameters that do not apply to an algorithm are `null`. `metrics` is
//! present exactly when the dataset supplied ground-truth labels.
//! Non-iterative pipelines (uniform-average and localized baselines) report
//! an empty `objective_trace`, `iterations = 0`, and `converged = true`.
//! Floating-point values are written in the shortest decimal form that
//! reparses to the same bits, so a write/read round trip is lossless.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use lswmkc_core::MetricScores;

/// Hyper-parameters of a run; inapplicable entries are `None`/`null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParameters {
    /// Kernel-fitting balance weight (graph-learning algorithm only).
    pub alpha: Option<f64>,
    /// Neighbor count of the sparse initialization.
    pub c: Option<usize>,
    /// Neighbor ratio (localized baseline only; the selected value).
    pub tau: Option<f64>,
    /// Cluster count.
    pub k: usize,
    /// k-means restarts.
    pub restarts: usize,
    /// Random seed.
    pub seed: u64,
    /// Sweep cap for iterative algorithms.
    pub max_iter: Option<usize>,
    /// Relative objective-change convergence threshold.
    pub rel_tol: Option<f64>,
}

/// External validity indices against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub ari: f64,
    /// True when the pair-counting index was degenerate (constant or
    /// single-sample partitions) and `ari` reports the 0.0 convention.
    pub ari_degenerate: bool,
}

impl From<&MetricScores> for RunMetrics {
    fn from(scores: &MetricScores) -> Self {
        RunMetrics {
            acc: scores.acc,
            nmi: scores.nmi,
            purity: scores.purity,
            ari: scores.ari,
            ari_degenerate: scores.ari_degenerate,
        }
    }
}

/// The artifact written by `lswmkc cluster`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Schema version; currently always 1.
    pub format_version: u32,
    /// Algorithm identifier: `lswmkc`, `avgkkm`, `mkkm`, or `knn`.
    pub algorithm: String,
    pub parameters: RunParameters,
    /// Predicted cluster label per sample.
    pub labels: Vec<usize>,
    /// Present exactly when ground-truth labels were supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RunMetrics>,
    /// Objective value after initialization and after each sweep
    /// (non-increasing for the graph-learning algorithm; empty for
    /// non-iterative pipelines).
    pub objective_trace: Vec<f64>,
    /// Whether the relative objective change dropped below `rel_tol`.
    pub converged: bool,
    /// Completed sweeps.
    pub iterations: usize,
    /// Wall-clock duration of the algorithm (excludes file I/O).
    pub runtime_ms: u64,
}

impl RunResult {
    /// Serializes as pretty-printed JSON (trailing newline included).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("run result serializes");
        text.push('\n');
        text
    }

    /// Writes the document to a file.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())
            .with_context(|| format!("writing run result `{}`", path.display()))
    }

    /// Reads a document back.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading run result `{}`", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing run result `{}`", path.display()))
    }
}

/// The artifact written by `lswmkc eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Schema version; currently always 1.
    pub format_version: u32,
    #[serde(flatten)]
    pub metrics: RunMetrics,
}
