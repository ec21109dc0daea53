//! Subcommand implementations behind the `lswmkc` binary.

use std::fs;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

use lswmkc_core::kkm::{avg_kkm, kkm_cluster, mkkm};
use lswmkc_core::knn::{build_neighbor_mask, knn_baseline_cluster, localized_average, DEFAULT_TAU_GRID};
use lswmkc_core::metrics::score_all;
use lswmkc_core::solver::{grid_search_alpha, solve, update_neighborhood_kernel, SolverConfig, DEFAULT_ALPHA_GRID};
use lswmkc_core::synth::{generate, SyntheticSpec};
use lswmkc_core::{ClusterAssignment, KernelMatrix, KernelSet};

use crate::args::{
    Algo, Cli, ClusterArgs, Command, EvalArgs, InspectArgs, MatrixFormat, PreprocessArgs,
    SynthArgs,
};
use crate::io;
use crate::manifest::{load_manifest, symmetrize, symmetry_residual, DatasetManifest};
use crate::result::{EvalResult, RunMetrics, RunParameters, RunResult};

/// Routes a parsed invocation to its implementation.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Synth(args) => synth(args),
        Command::Preprocess(args) => preprocess(args),
        Command::Eval(args) => eval(args),
        Command::Inspect(args) => inspect(args),
    }
}

/// Everything a finished algorithm run contributes to the result document,
/// plus the matrices worth exporting for figures.
struct AlgorithmOutput {
    labels: ClusterAssignment,
    metrics: Option<RunMetrics>,
    parameters: RunParameters,
    objective_trace: Vec<f64>,
    converged: bool,
    iterations: usize,
    dumps: Vec<(&'static str, DMatrix<f64>)>,
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let (ks, truth, manifest) = load_manifest(&args.data)?;
    let k = args.clusters.unwrap_or(manifest.k);
    // Tables go to stdout unless the run result itself is printed there.
    let table_to_stdout = args.out.is_some();

    let started = Instant::now();
    let output = match args.algo {
        Algo::Lswmkc => run_lswmkc(&args, &ks, truth.as_ref(), k, table_to_stdout)?,
        Algo::Avgkkm => run_avgkkm(&args, &ks, truth.as_ref(), k)?,
        Algo::Mkkm => run_mkkm(&args, &ks, truth.as_ref(), k)?,
        Algo::Knn => run_knn(&args, &ks, truth.as_ref(), k, table_to_stdout)?,
    };
    let runtime_ms = started.elapsed().as_millis() as u64;

    if let Some(dir) = &args.dump_matrices {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating dump directory `{}`", dir.display()))?;
        for (name, matrix) in &output.dumps {
            io::write_matrix_csv(&dir.join(format!("{name}.csv")), matrix)?;
        }
    }

    let result = RunResult {
        format_version: 1,
        algorithm: args.algo.id().to_string(),
        parameters: output.parameters,
        labels: output.labels.labels().to_vec(),
        metrics: output.metrics,
        objective_trace: output.objective_trace,
        converged: output.converged,
        iterations: output.iterations,
        runtime_ms,
    };
    match &args.out {
        Some(path) => result.save(path)?,
        None => print!("{}", result.to_json()),
    }
    Ok(())
}

fn run_lswmkc(
    args: &ClusterArgs,
    ks: &KernelSet,
    truth: Option<&ClusterAssignment>,
    k: usize,
    table_to_stdout: bool,
) -> Result<AlgorithmOutput> {
    let cfg = SolverConfig {
        alpha: args.alpha.unwrap_or(1.0),
        neighbors: args.neighbors,
        clusters: k,
        max_iter: args.max_iter,
        rel_tol: args.tol,
        seed: args.seed,
    };

    let (state, assignment, metrics, alpha) = if args.grid_alpha {
        let sweep = grid_search_alpha(ks, &cfg, &DEFAULT_ALPHA_GRID, truth, args.restarts)
            .context("alpha grid sweep failed (rerun with --alpha to isolate the failing value)")?;
        let mut table = String::from("alpha      converged  iterations  objective       acc\n");
        for run in &sweep.runs {
            let acc = run
                .metrics
                .as_ref()
                .map_or("-".to_string(), |m| format!("{:.4}", m.acc));
            table.push_str(&format!(
                "{:<10} {:<10} {:<11} {:<15.8} {}\n",
                run.alpha,
                run.state.converged,
                run.state.iterations,
                run.state.final_objective(),
                acc
            ));
        }
        emit_table(&table, table_to_stdout);
        let best = &sweep.runs[sweep.best];
        (
            best.state.clone(),
            best.assignment.clone(),
            best.metrics.as_ref().map(RunMetrics::from),
            best.alpha,
        )
    } else {
        let state = solve(ks, &cfg)?;
        let assignment = kkm_cluster(&state.kstar, k, args.restarts, args.seed)?;
        let metrics = match truth {
            Some(t) => Some(RunMetrics::from(&score_all(&assignment, t)?)),
            None => None,
        };
        (state, assignment, metrics, cfg.alpha)
    };

    Ok(AlgorithmOutput {
        labels: assignment,
        metrics,
        parameters: RunParameters {
            alpha: Some(alpha),
            c: Some(args.neighbors),
            tau: None,
            k,
            restarts: args.restarts,
            seed: args.seed,
            max_iter: Some(args.max_iter),
            rel_tol: Some(args.tol),
        },
        objective_trace: state.objective_trace.clone(),
        converged: state.converged,
        iterations: state.iterations,
        dumps: vec![
            ("graph", state.graph.values().clone()),
            ("kernel", state.kstar.values().clone()),
        ],
    })
}

fn run_avgkkm(
    args: &ClusterArgs,
    ks: &KernelSet,
    truth: Option<&ClusterAssignment>,
    k: usize,
) -> Result<AlgorithmOutput> {
    let assignment = avg_kkm(ks, k, args.restarts, args.seed)?;
    let metrics = match truth {
        Some(t) => Some(RunMetrics::from(&score_all(&assignment, t)?)),
        None => None,
    };
    Ok(AlgorithmOutput {
        labels: assignment,
        metrics,
        parameters: RunParameters {
            alpha: None,
            c: None,
            tau: None,
            k,
            restarts: args.restarts,
            seed: args.seed,
            max_iter: None,
            rel_tol: None,
        },
        objective_trace: Vec::new(),
        converged: true,
        iterations: 0,
        dumps: vec![("kernel", uniform_average(ks))],
    })
}

/// Plain average of the base kernels, matching the combination the
/// uniform-average and localized baselines operate on.
fn uniform_average(ks: &KernelSet) -> DMatrix<f64> {
    let n = ks.n();
    let mut sum = DMatrix::zeros(n, n);
    for kernel in ks.kernels() {
        sum += kernel.values();
    }
    sum / ks.m() as f64
}

fn run_mkkm(
    args: &ClusterArgs,
    ks: &KernelSet,
    truth: Option<&ClusterAssignment>,
    k: usize,
) -> Result<AlgorithmOutput> {
    let result = mkkm(ks, k, args.restarts, args.seed, args.max_iter)?;
    let metrics = match truth {
        Some(t) => Some(RunMetrics::from(&score_all(&result.assignment, t)?)),
        None => None,
    };
    // Export the final squared-weight combination for figures.
    let n = ks.n();
    let mut combined = DMatrix::zeros(n, n);
    for (p, kernel) in ks.kernels().iter().enumerate() {
        let w2 = result.weights[p] * result.weights[p];
        combined += kernel.values() * w2;
    }
    Ok(AlgorithmOutput {
        labels: result.assignment.clone(),
        metrics,
        parameters: RunParameters {
            alpha: None,
            c: None,
            tau: None,
            k,
            restarts: args.restarts,
            seed: args.seed,
            max_iter: Some(args.max_iter),
            // The alternating baseline uses a fixed internal threshold.
            rel_tol: Some(1e-6),
        },
        objective_trace: result.objective_trace,
        converged: result.converged,
        iterations: result.iterations,
        dumps: vec![("kernel", combined)],
    })
}

fn run_knn(
    args: &ClusterArgs,
    ks: &KernelSet,
    truth: Option<&ClusterAssignment>,
    k: usize,
    table_to_stdout: bool,
) -> Result<AlgorithmOutput> {
    let grid: Vec<f64> = match (&args.tau, &args.tau_grid) {
        (Some(tau), _) => vec![*tau],
        (None, Some(spec)) => spec.0.clone(),
        (None, None) => DEFAULT_TAU_GRID.to_vec(),
    };
    let sweep = knn_baseline_cluster(ks, k, &grid, args.restarts, args.seed, truth)?;
    if grid.len() > 1 {
        let mut table = String::from("tau    wcss            acc\n");
        for run in &sweep.runs {
            let acc = run
                .metrics
                .as_ref()
                .map_or("-".to_string(), |m| format!("{:.4}", m.acc));
            table.push_str(&format!("{:<6.2} {:<15.8} {}\n", run.tau, run.wcss, acc));
        }
        emit_table(&table, table_to_stdout);
    }
    let best = sweep.best_run();

    // Rebuild the matrices of the winning ratio for figure export.
    let uniform = KernelMatrix::new(uniform_average(ks))?;
    let mask = build_neighbor_mask(&uniform, best.tau)?;
    let consensus = localized_average(ks, &mask)?;
    let clipped = update_neighborhood_kernel(consensus.values())?;

    Ok(AlgorithmOutput {
        labels: best.assignment.clone(),
        metrics: best.metrics.as_ref().map(RunMetrics::from),
        parameters: RunParameters {
            alpha: None,
            c: None,
            tau: Some(best.tau),
            k,
            restarts: args.restarts,
            seed: args.seed,
            max_iter: None,
            rel_tol: None,
        },
        objective_trace: Vec::new(),
        converged: true,
        iterations: 0,
        dumps: vec![
            ("mask", mask.values().clone()),
            ("kernel", clipped.into_values()),
        ],
    })
}

/// Grid reports go to stdout when the run result is written to a file, and
/// to stderr when the run result itself occupies stdout.
fn emit_table(table: &str, to_stdout: bool) {
    if to_stdout {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        per_cluster: args.per_cluster,
        clusters: args.clusters,
        dims: args.dims.unwrap_or(args.clusters),
        separation: args.separation,
        kernels: args.kernels,
        noise_kernels: args.noise_kernels,
        seed: args.seed,
    };
    let (ks, truth) = generate(&spec)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory `{}`", args.out.display()))?;

    let mut kernel_paths = Vec::with_capacity(ks.m());
    for (p, kernel) in ks.kernels().iter().enumerate() {
        let file = format!("kernel_{p}.{}", args.format.extension());
        let path = args.out.join(&file);
        match args.format {
            MatrixFormat::Csv => io::write_matrix_csv(&path, kernel.values())?,
            MatrixFormat::Kmx => io::write_matrix_kmx(&path, kernel.values())?,
        }
        kernel_paths.push(file);
    }
    io::write_labels(&args.out.join("labels.txt"), &truth)?;

    let manifest = DatasetManifest {
        format_version: 1,
        name: args.name.clone(),
        n: ks.n(),
        m: ks.m(),
        k: args.clusters,
        kernel_paths,
        labels_path: Some("labels.txt".to_string()),
    };
    let manifest_path = args.out.join("manifest.json");
    manifest.save(&manifest_path)?;
    println!("{}", manifest_path.display());
    Ok(())
}

fn preprocess(args: PreprocessArgs) -> Result<()> {
    let (ks, truth, manifest) = load_manifest(&args.data)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory `{}`", args.out.display()))?;

    let mut kernel_paths = Vec::with_capacity(ks.m());
    for (p, kernel) in ks.kernels().iter().enumerate() {
        let processed = lswmkc_core::kernel::preprocess_kernel(kernel)
            .with_context(|| format!("preprocessing kernel {p}"))?;
        let file = format!("kernel_{p}.{}", args.format.extension());
        let path = args.out.join(&file);
        match args.format {
            MatrixFormat::Csv => io::write_matrix_csv(&path, processed.values())?,
            MatrixFormat::Kmx => io::write_matrix_kmx(&path, processed.values())?,
        }
        kernel_paths.push(file);
    }

    let labels_path = match &truth {
        Some(assignment) => {
            io::write_labels(&args.out.join("labels.txt"), assignment)?;
            Some("labels.txt".to_string())
        }
        None => None,
    };

    let out_manifest = DatasetManifest {
        format_version: 1,
        name: manifest.name.clone(),
        n: manifest.n,
        m: manifest.m,
        k: manifest.k,
        kernel_paths,
        labels_path,
    };
    let manifest_path = args.out.join("manifest.json");
    out_manifest.save(&manifest_path)?;
    println!("{}", manifest_path.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let manifest = DatasetManifest::load(&args.data)?;
    let truth_entry = manifest
        .labels_path
        .clone()
        .with_context(|| format!("manifest `{}` has no labels_path", args.data.display()))?;
    let truth_path = manifest.resolve(&args.data, &truth_entry);
    let truth = io::read_labels(&truth_path, manifest.n, manifest.k)?;
    let pred = io::read_labels(&args.pred, manifest.n, manifest.k)?;
    let scores = score_all(&pred, &truth)?;
    let result = EvalResult {
        format_version: 1,
        metrics: RunMetrics::from(&scores),
    };
    let mut text = serde_json::to_string_pretty(&result).expect("eval result serializes");
    text.push('\n');
    match &args.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing eval result `{}`", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn inspect(args: InspectArgs) -> Result<()> {
    let manifest = DatasetManifest::load(&args.data)?;
    let mut report = Vec::new();
    println!(
        "{:<24} {:>6} {:>8} {:>14} {:>14} {:>10} {:>10}",
        "kernel", "n", "format", "sym_residual", "min_eigval", "diag_min", "diag_max"
    );
    for entry in &manifest.kernel_paths {
        let path = manifest.resolve(&args.data, entry);
        let raw = io::read_matrix(&path)?;
        if raw.nrows() != manifest.n || raw.ncols() != manifest.n {
            bail!(
                "kernel file `{}`: expected a {n}x{n} matrix, found {r}x{c}",
                path.display(),
                n = manifest.n,
                r = raw.nrows(),
                c = raw.ncols()
            );
        }
        let format = io::sniff_format(&path)?;
        let residual = symmetry_residual(&raw);
        let kernel = KernelMatrix::new(symmetrize(&raw))
            .with_context(|| format!("kernel file `{}`", path.display()))?;
        let psd = lswmkc_core::kernel::check_psd(&kernel, 1e-8)?;
        let diag = kernel.values().diagonal();
        let diag_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let diag_max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<24} {:>6} {:>8} {:>14.3e} {:>14.6e} {:>10.4} {:>10.4}",
            entry, manifest.n, format, residual, psd.min_eigenvalue, diag_min, diag_max
        );
        report.push(serde_json::json!({
            "kernel": entry,
            "n": manifest.n,
            "format": format,
            "symmetry_residual": residual,
            "min_eigenvalue": psd.min_eigenvalue,
            "is_psd": psd.is_psd,
            "diag_min": diag_min,
            "diag_max": diag_max,
        }));
    }
    if let Some(path) = &args.out {
        let doc = serde_json::json!({
            "format_version": 1,
            "name": manifest.name,
            "kernels": report,
        });
        fs::write(path, serde_json::to_string_pretty(&doc).expect("report serializes") + "\n")
            .with_context(|| format!("writing inspect report `{}`", path.display()))?;
    }
    Ok(())
}
