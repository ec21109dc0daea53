//! Command-line plumbing for the multiple-kernel clustering toolkit:
//! dataset manifests, kernel matrix file formats (headerless CSV and the
//! binary `KMX1` container), label files, run-result documents, and the
//! subcommand implementations behind the `lswmkc` binary.
//!
//! Everything numerical lives in `lswmkc-core`; this crate only moves bytes
//! and wires parsed arguments to library calls. All randomness is seeded, so
//! the same argv over the same files produces an identical run-result
//! document apart from `runtime_ms`.

pub mod args;
pub mod commands;
pub mod io;
pub mod manifest;
pub mod result;
