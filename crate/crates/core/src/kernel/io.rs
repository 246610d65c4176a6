//! Matrix and vector exchange formats.
//!
//! * CSV: one matrix row per line, comma-separated decimals. Blank lines are
//!   skipped. Values are written with Rust's shortest round-trip formatting,
//!   so write → read is lossless.
//! * Binary: little-endian `u64` rows, `u64` cols, then `rows·cols`
//!   little-endian `f64` values in row-major order.
//!
//! Files ending in `.bin` use the binary format, everything else is CSV.
//! Vectors are matrices with one row or one column.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl MatrixFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("bin") => MatrixFormat::Binary,
            _ => MatrixFormat::Csv,
        }
    }
}

pub fn parse_csv_matrix(text: &str) -> Result<Matrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    Error::input(format!(
                        "line {}: cannot parse {:?} as a number: {e}",
                        lineno + 1,
                        field.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::input("CSV matrix is empty"));
    }
    Matrix::from_rows(&rows).map_err(|e| Error::input(e.to_string()))
}

pub fn write_csv_matrix<W: Write>(mut w: W, m: &Matrix) -> io::Result<()> {
    for r in 0..m.rows() {
        let line = m
            .row(r)
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn decode_binary_matrix(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 16 {
        return Err(Error::input(format!(
            "binary matrix header needs 16 bytes, got {}",
            bytes.len()
        )));
    }
    let rows = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let count = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::input(format!("binary matrix dimensions {rows}x{cols} overflow")))?;
    let body = &bytes[16..];
    if body.len() as u64 != count {
        return Err(Error::input(format!(
            "binary matrix declares {rows}x{cols} ({count} bytes) but has {} payload bytes",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::from_row_major(rows as usize, cols as usize, &values)
        .map_err(|e| Error::input(e.to_string()))
}

pub fn encode_binary_matrix(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * m.rows() * m.cols());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let parsed = match MatrixFormat::from_path(path) {
        MatrixFormat::Binary => decode_binary_matrix(&bytes),
        MatrixFormat::Csv => {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::input("CSV file is not valid UTF-8"))?;
            parse_csv_matrix(&text)
        }
    };
    parsed.map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let bytes = match MatrixFormat::from_path(path) {
        MatrixFormat::Binary => encode_binary_matrix(m),
        MatrixFormat::Csv => {
            let mut buf = Vec::new();
            write_csv_matrix(&mut buf, m).expect("writing to a Vec cannot fail");
            buf
        }
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a vector stored as a single row or a single column.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let m = read_matrix(path)?;
    if m.rows() == 1 || m.cols() == 1 {
        Ok(m.to_row_major())
    } else {
        Err(Error::input(format!(
            "{}: expected a vector, found a {}x{} matrix",
            path.display(),
            m.rows(),
            m.cols()
        )))
    }
}

/// Writes a vector as a single row.
pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let m = Matrix::from_row_major(1, v.len(), v)?;
    write_matrix(path, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parses_rows() {
        let m = parse_csv_matrix("1, 2.5\n\n-3,4e-2\n").unwrap();
        assert_eq!(m.to_row_major(), vec![1.0, 2.5, -3.0, 0.04]);
    }

    #[test]
    fn csv_errors() {
        assert!(parse_csv_matrix("").is_err());
        assert!(parse_csv_matrix("1,2\n3\n").is_err());
        let err = parse_csv_matrix("1,x\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn binary_layout() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let bytes = encode_binary_matrix(&m);
        assert_eq!(&bytes[0..8], &3u64.to_le_bytes());
        assert_eq!(&bytes[8..16], &2u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &2.0f64.to_le_bytes());
        assert_eq!(decode_binary_matrix(&bytes).unwrap(), m);
        assert!(decode_binary_matrix(&bytes[..30]).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            MatrixFormat::from_path(Path::new("x.bin")),
            MatrixFormat::Binary
        );
        assert_eq!(
            MatrixFormat::from_path(Path::new("x.csv")),
            MatrixFormat::Csv
        );
        assert_eq!(MatrixFormat::from_path(Path::new("x")), MatrixFormat::Csv);
    }
}
