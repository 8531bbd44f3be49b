//! Matrix text format.
//!
//! First line `rows cols`, then one line per row with the entries separated
//! by single spaces. Entries are written in scientific notation with 17
//! significant digits, which round-trips `f64` exactly.

use std::io::{BufRead, Write};

use super::Matrix;
use crate::error::{Error, Result};

pub fn write_matrix_text(m: &Matrix, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let mut line = String::new();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{v:.16e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix_text(r: &mut impl BufRead) -> Result<Matrix> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .ok_or_else(|| Error::Parse("missing row count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad row count: {e}")))?;
    let cols: usize = parts
        .next()
        .ok_or_else(|| Error::Parse("missing column count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad column count: {e}")))?;
    if parts.next().is_some() {
        return Err(Error::Parse("trailing tokens after matrix header".into()));
    }

    let mut data = Vec::with_capacity(rows.saturating_mul(cols));
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Parse(format!("missing row {i}")));
        }
        let mut count = 0;
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|e| Error::Parse(format!("row {i}: bad entry {tok:?}: {e}")))?;
            data.push(v);
            count += 1;
        }
        if count != cols {
            return Err(Error::Parse(format!(
                "row {i} has {count} entries, expected {cols}"
            )));
        }
    }
    Matrix::new(rows, cols, data)
}

impl Matrix {
    /// Writes the matrix text format to a file.
    pub fn save_text(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_matrix_text(self, &mut f)
    }

    /// Reads the matrix text format from a file.
    pub fn load_text(path: impl AsRef<std::path::Path>) -> Result<Matrix> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        read_matrix_text(&mut f)
    }
}
