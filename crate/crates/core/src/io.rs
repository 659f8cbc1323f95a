//! CSV input and output of numeric tables.
//!
//! Every table carries a header row. Values are written with 17 significant
//! digits, so a write/read round trip reproduces each `f64` exactly.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub data: DMatrix<f64>,
}

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads a CSV table. Blank cells and non-finite values are rejected.
pub fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse("missing header row".into()));
    }
    let p = headers.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != p {
            return Err(Error::Parse(format!("row {} has {} fields, expected {p}", row + 1, record.len())));
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("row {}, column {}: '{cell}' is not a number", row + 1, col + 1)))?;
            if !v.is_finite() {
                return Err(Error::NonFiniteInput { row, col });
            }
            values.push(v);
        }
        rows += 1;
    }
    // A header made of numbers means the header row is missing.
    if headers.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(Error::Parse("header row is missing (first row is numeric)".into()));
    }
    Ok(Table { headers, data: DMatrix::from_row_slice(rows, p, &values) })
}

pub fn read_table_path(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    read_table(std::io::BufReader::new(file))
}

pub fn write_table<W: Write>(writer: W, headers: &[String], data: &DMatrix<f64>) -> Result<()> {
    if headers.len() != data.ncols() {
        return Err(Error::DimensionMismatch { expected: data.ncols(), found: headers.len() });
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(headers)?;
    for r in 0..data.nrows() {
        w.write_record(data.row(r).iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_path(path: &Path, headers: &[String], data: &DMatrix<f64>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_table(std::io::BufWriter::new(file), headers, data)
}

/// Default column names `x1, …, xp`.
pub fn default_headers(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let data = DMatrix::from_row_slice(2, 2, &[0.1, -1.0 / 3.0, 1e-300, 6.02214076e23]);
        let headers = default_headers(2);
        let mut buf = Vec::new();
        write_table(&mut buf, &headers, &data).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back.data, data);
        assert_eq!(back.headers, headers);
    }

    #[test]
    fn numeric_first_row_is_rejected() {
        assert!(matches!(read_table("1.0,2.0\n3.0,4.0\n".as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn non_finite_cell_is_reported() {
        let err = read_table("a,b\n1,2\n3,NaN\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteInput { row: 1, col: 1 }));
    }
}
