//! Matrix Market I/O for dense matrices and vectors.
//!
//! Writes `%%MatrixMarket matrix array real general` (column-major values,
//! shortest round-trip formatting). Reads both `array` and `coordinate`
//! layouts, `general` or `symmetric`, into a dense matrix.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{IlsError, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(msg: impl Into<String>) -> IlsError {
    IlsError::Parse(msg.into())
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry)> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(format!("bad Matrix Market header: `{line}`")));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(format!("unsupported layout `{other}`"))),
    };
    match tokens[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(parse_err(format!("unsupported field `{other}`"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(format!("unsupported symmetry `{other}`"))),
    };
    Ok((layout, symmetry))
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(format!("invalid {what}")))
}

fn parse_f64(tok: Option<&str>) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err("missing value"))?;
    tok.parse()
        .map_err(|_| parse_err(format!("invalid value `{tok}`")))
}

pub fn read_matrix_from<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty input"))??;
    let (layout, symmetry) = parse_header(&header)?;

    let mut body = lines.filter_map(|l| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok(t.to_string()))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let size_line = body
        .next()
        .ok_or_else(|| parse_err("missing size line"))??;
    let mut it = size_line.split_whitespace();
    let rows = parse_usize(it.next(), "row count")?;
    let cols = parse_usize(it.next(), "column count")?;
    if symmetry == Symmetry::Symmetric && rows != cols {
        return Err(parse_err("symmetric matrix must be square"));
    }
    let mut m = DenseMatrix::zeros(rows, cols);

    match layout {
        Layout::Array => {
            // Column-major; symmetric stores the lower triangle only.
            let mut coords = (0..cols).flat_map(|j| {
                let start = if symmetry == Symmetry::Symmetric {
                    j
                } else {
                    0
                };
                (start..rows).map(move |i| (i, j))
            });
            let expected = match symmetry {
                Symmetry::General => rows * cols,
                Symmetry::Symmetric => rows * (rows + 1) / 2,
            };
            let mut count = 0;
            for line in body {
                let line = line?;
                for tok in line.split_whitespace() {
                    let (i, j) = coords
                        .next()
                        .ok_or_else(|| parse_err("too many values in array body"))?;
                    let v = parse_f64(Some(tok))?;
                    m.set(i, j, v);
                    if symmetry == Symmetry::Symmetric {
                        m.set(j, i, v);
                    }
                    count += 1;
                }
            }
            if count != expected {
                return Err(parse_err(format!(
                    "expected {expected} values, found {count}"
                )));
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(it.next(), "entry count")?;
            let mut count = 0;
            for line in body {
                let line = line?;
                let mut t = line.split_whitespace();
                let i = parse_usize(t.next(), "row index")?;
                let j = parse_usize(t.next(), "column index")?;
                let v = parse_f64(t.next())?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(format!("entry ({i}, {j}) out of range")));
                }
                m.set(i - 1, j - 1, m.get(i - 1, j - 1) + v);
                if symmetry == Symmetry::Symmetric && i != j {
                    m.set(j - 1, i - 1, m.get(j - 1, i - 1) + v);
                }
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(format!("expected {nnz} entries, found {count}")));
            }
        }
    }
    DenseMatrix::new(rows, cols, m.into_data())
}

pub fn write_matrix_to<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:e}", m.get(i, j))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_matrix_from(BufReader::new(File::open(path)?))
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    write_matrix_to(BufWriter::new(File::create(path)?), m)
}

/// Reads a vector stored as an `n×1` or `1×n` matrix.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    matrix_to_vector(read_matrix(path)?)
}

pub fn read_vector_from<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    matrix_to_vector(read_matrix_from(reader)?)
}

fn matrix_to_vector(m: DenseMatrix) -> Result<Vec<f64>> {
    if m.cols() == 1 || m.rows() == 1 || m.rows() * m.cols() == 0 {
        Ok(m.into_data())
    } else {
        Err(IlsError::Shape(format!(
            "expected a vector, got a {}x{} matrix",
            m.rows(),
            m.cols()
        )))
    }
}

/// Writes `v` as an `n×1` array.
pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    write_vector_to(BufWriter::new(File::create(path)?), v)
}

pub fn write_vector_to<W: Write>(w: W, v: &[f64]) -> Result<()> {
    let m = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    write_matrix_to(w, &m)
}
