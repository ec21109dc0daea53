//! Argument surface of the `lswmkc` binary.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Multiple-kernel clustering toolkit.
#[derive(Debug, Parser)]
#[command(name = "lswmkc", version, about)]
pub struct Cli {
    /// Worker threads for internal parallelism (0 = automatic). The thread
    /// count never changes numerical results.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a multi-kernel dataset and write a run-result document.
    Cluster(ClusterArgs),
    /// Generate a synthetic multi-view kernel dataset on disk.
    Synth(SynthArgs),
    /// Center and normalize every kernel of a dataset into a new directory.
    Preprocess(PreprocessArgs),
    /// Score externally produced labels against a dataset's ground truth.
    Eval(EvalArgs),
    /// Print per-kernel diagnostics: symmetry residual, minimum eigenvalue,
    /// and diagonal statistics.
    Inspect(InspectArgs),
}

/// Clustering algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Consensus graph learning with a neighborhood-kernel output.
    Lswmkc,
    /// Kernel k-means on the uniform average of the base kernels.
    Avgkkm,
    /// Alternating multiple-kernel k-means with squared simplex weights.
    Mkkm,
    /// Kernel k-means on a nearest-neighbor localized average kernel.
    Knn,
}

impl Algo {
    /// Identifier stored in the run-result document.
    pub fn id(self) -> &'static str {
        match self {
            Algo::Lswmkc => "lswmkc",
            Algo::Avgkkm => "avgkkm",
            Algo::Mkkm => "mkkm",
            Algo::Knn => "knn",
        }
    }
}

/// Kernel file format for commands that write matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    /// Headerless dense CSV (language-neutral).
    Csv,
    /// Binary `KMX1` container (magic bytes, little-endian).
    Kmx,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Kmx => "kmx",
        }
    }
}

/// Inclusive arithmetic grid `start:end:step`, e.g. `0.1:0.9:0.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec(pub Vec<f64>);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:END:STEP, got `{s}`"));
        }
        let parse = |p: &str| -> Result<f64, String> {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{p}` in grid `{s}`: {e}"))
        };
        let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if !start.is_finite() || !end.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(format!("grid `{s}` needs finite bounds and a positive step"));
        }
        if end < start {
            return Err(format!("grid `{s}` has END below START"));
        }
        let mut values = Vec::new();
        let mut t = 0_usize;
        // Multiples of the step avoid accumulating addition error.
        loop {
            let v = start + step * t as f64;
            if v > end + 1e-12 {
                break;
            }
            values.push(v);
            t += 1;
        }
        if values.is_empty() {
            return Err(format!("grid `{s}` contains no points"));
        }
        Ok(GridSpec(values))
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    pub algo: Algo,

    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Number of clusters (defaults to the manifest's `k`).
    #[arg(long, value_name = "K")]
    pub clusters: Option<usize>,

    /// Balance weight of the kernel-fitting term (default 1).
    #[arg(long, value_name = "F", conflicts_with = "grid_alpha")]
    pub alpha: Option<f64>,

    /// Sweep alpha over 1, 2, 4, ..., 1024 and keep the best run.
    #[arg(long)]
    pub grid_alpha: bool,

    /// Neighbor count for the sparse graph initialization.
    #[arg(long, default_value_t = 5, value_name = "C")]
    pub neighbors: usize,

    /// Neighbor ratio for the localized baseline.
    #[arg(long, value_name = "F", conflicts_with = "tau_grid")]
    pub tau: Option<f64>,

    /// Neighbor-ratio grid for the localized baseline
    /// (default 0.1:0.9:0.1 when neither --tau nor --tau-grid is given).
    #[arg(long, value_name = "A:B:STEP")]
    pub tau_grid: Option<GridSpec>,

    /// k-means restarts.
    #[arg(long, default_value_t = 50, value_name = "N")]
    pub restarts: usize,

    /// Maximum alternating sweeps.
    #[arg(long, default_value_t = 50, value_name = "N")]
    pub max_iter: usize,

    /// Relative objective-change threshold declaring convergence.
    #[arg(long, default_value_t = 1e-6, value_name = "F")]
    pub tol: f64,

    /// Random seed.
    #[arg(long, default_value_t = 0, value_name = "U64")]
    pub seed: u64,

    /// Output path for the run-result document (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Directory for CSV exports of the learned matrices (graph, kernel,
    /// mask), enabling external heatmap rendering.
    #[arg(long, value_name = "DIR")]
    pub dump_matrices: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Samples per cluster.
    #[arg(long, default_value_t = 50, value_name = "N")]
    pub per_cluster: usize,

    /// Number of clusters.
    #[arg(long, default_value_t = 3, value_name = "K")]
    pub clusters: usize,

    /// Feature dimensionality (defaults to the cluster count).
    #[arg(long, value_name = "D")]
    pub dims: Option<usize>,

    /// Centroid separation in within-cluster standard deviations.
    #[arg(long, default_value_t = 6.0, value_name = "F")]
    pub separation: f64,

    /// Total number of kernels.
    #[arg(long, default_value_t = 4, value_name = "M")]
    pub kernels: usize,

    /// How many of the kernels are pure noise (placed at the tail indices).
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub noise_kernels: usize,

    /// Random seed.
    #[arg(long, default_value_t = 0, value_name = "U64")]
    pub seed: u64,

    /// Dataset name recorded in the manifest.
    #[arg(long, default_value = "synthetic")]
    pub name: String,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Kernel file format.
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Kernel file format for the preprocessed matrices.
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dataset manifest path; its `labels_path` supplies the ground truth.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Predicted labels file (one integer in [0, k) per line).
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,

    /// Output path for the score document (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Optional path for a structured report (stdout table always printed).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
