//! `lswmkc` binary: parses arguments, configures logging and the global
//! thread pool, and dispatches to the subcommand implementations.
//!
//! Exit codes: 0 on success, 1 on runtime errors (with a diagnostic on
//! stderr), 2 on argument errors (clap's convention).

use clap::Parser;

use lswmkc_cli::args::Cli;
use lswmkc_cli::commands;

fn main() {
    let cli = Cli::parse();

    // `LSWMKC_LOG` controls verbosity; warnings (e.g. kernel symmetrization
    // repairs) are visible by default.
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LSWMKC_LOG", "warn"))
        .format_timestamp(None)
        .init();

    // The thread count caps parallelism but never changes numerical results;
    // 0 leaves the pool at its automatic default.
    if cli.threads > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: configuring {} worker threads: {err}", cli.threads);
            std::process::exit(1);
        }
    }

    if let Err(err) = commands::dispatch(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
