//! Matrix and label file formats.
//!
//! Matrices travel either as headerless dense CSV (decimal floating point,
//! row-major) or as the binary `KMX1` container: the 4 magic bytes `KMX1`,
//! the sample count as a little-endian u64, then the n*n entries as
//! little-endian f64 in row-major order. Readers pick the format by sniffing
//! the magic bytes, never by file extension. Both formats round-trip f64
//! values exactly (CSV uses the shortest decimal form that reparses to the
//! same bits).
//!
//! Labels travel as plain text, one integer per line.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

use lswmkc_core::ClusterAssignment;

/// Magic bytes of the binary matrix container.
pub const KMX_MAGIC: [u8; 4] = *b"KMX1";

/// Reads a dense matrix, sniffing the format from the leading bytes.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = fs::read(path).with_context(|| format!("reading matrix file `{}`", path.display()))?;
    if bytes.len() >= 4 && bytes[..4] == KMX_MAGIC {
        parse_kmx(&bytes).with_context(|| format!("parsing binary matrix file `{}`", path.display()))
    } else {
        parse_csv(&bytes).with_context(|| format!("parsing CSV matrix file `{}`", path.display()))
    }
}

fn parse_kmx(bytes: &[u8]) -> Result<DMatrix<f64>> {
    if bytes.len() < 12 {
        bail!("truncated header: {} bytes", bytes.len());
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().expect("8-byte slice")) as usize;
    if n == 0 {
        bail!("declared size is 0");
    }
    let cells = n
        .checked_mul(n)
        .with_context(|| format!("declared size {n} overflows"))?;
    let expected = 12 + 8 * cells;
    if bytes.len() != expected {
        bail!(
            "expected {expected} bytes for a {n}x{n} matrix, found {}",
            bytes.len()
        );
    }
    let mut values = Vec::with_capacity(cells);
    for cell in 0..cells {
        let at = 12 + 8 * cell;
        values.push(f64::from_le_bytes(
            bytes[at..at + 8].try_into().expect("8-byte slice"),
        ));
    }
    Ok(DMatrix::from_row_slice(n, n, &values))
}

fn parse_csv(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("row {}", index + 1))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().with_context(|| {
                format!("row {}, column {}: bad number `{field}`", index + 1, col + 1)
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no rows");
    }
    let cols = rows[0].len();
    for (index, row) in rows.iter().enumerate() {
        if row.len() != cols {
            bail!(
                "row {} has {} columns, row 1 has {cols}",
                index + 1,
                row.len()
            );
        }
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(DMatrix::from_row_slice(flat.len() / cols, cols, &flat))
}

/// Writes a matrix as headerless dense CSV.
pub fn write_matrix_csv(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let file = fs::File::create(path)
        .with_context(|| format!("creating matrix file `{}`", path.display()))?;
    let mut out = BufWriter::new(file);
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            if j > 0 {
                write!(out, ",")?;
            }
            // `{}` prints the shortest decimal form that reparses exactly.
            write!(out, "{}", matrix[(i, j)])?;
        }
        writeln!(out)?;
    }
    out.flush()
        .with_context(|| format!("writing matrix file `{}`", path.display()))
}

/// Writes a square matrix in the binary `KMX1` container.
pub fn write_matrix_kmx(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        bail!(
            "binary container holds square matrices only, got {}x{}",
            n,
            matrix.ncols()
        );
    }
    let file = fs::File::create(path)
        .with_context(|| format!("creating matrix file `{}`", path.display()))?;
    let mut out = BufWriter::new(file);
    out.write_all(&KMX_MAGIC)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    for i in 0..n {
        for j in 0..n {
            out.write_all(&matrix[(i, j)].to_le_bytes())?;
        }
    }
    out.flush()
        .with_context(|| format!("writing matrix file `{}`", path.display()))
}

/// Reads a labels file: one integer per line, `n` lines, every value in
/// `[0, k)`. Blank lines are ignored.
pub fn read_labels(path: &Path, n: usize, k: usize) -> Result<ClusterAssignment> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading labels file `{}`", path.display()))?;
    let mut labels = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: i64 = line.parse().with_context(|| {
            format!(
                "labels file `{}`, line {}: bad integer `{line}`",
                path.display(),
                index + 1
            )
        })?;
        if value < 0 {
            bail!(
                "labels file `{}`, line {}: label {value} is negative",
                path.display(),
                index + 1
            );
        }
        labels.push(value as usize);
    }
    if labels.len() != n {
        bail!(
            "labels file `{}` holds {} labels, dataset has {n} samples",
            path.display(),
            labels.len()
        );
    }
    ClusterAssignment::new(labels, k)
        .with_context(|| format!("labels file `{}`", path.display()))
}

/// Writes labels, one integer per line.
pub fn write_labels(path: &Path, assignment: &ClusterAssignment) -> Result<()> {
    let mut text = String::new();
    for &label in assignment.labels() {
        text.push_str(&label.to_string());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing labels file `{}`", path.display()))
}

/// Reads the leading bytes to report which format a matrix file uses.
pub fn sniff_format(path: &Path) -> Result<&'static str> {
    let mut head = [0_u8; 4];
    let mut file = fs::File::open(path)
        .with_context(|| format!("opening matrix file `{}`", path.display()))?;
    let read = file.read(&mut head)?;
    Ok(if read == 4 && head == KMX_MAGIC { "kmx" } else { "csv" })
}
