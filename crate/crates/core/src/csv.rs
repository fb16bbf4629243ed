//! Minimal CSV writer/reader for the fixed numeric schemas exported by the
//! library. Fields never contain commas or quotes, so no quoting is done.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), which
//! round-trips every `f64` exactly and is identical on every platform.

use std::io::Write;

use crate::{Error, Result};

/// Header of [`crate::spin::HusimiField::write_csv`].
pub const HUSIMI_HEADER: [&str; 3] = ["theta", "phi", "q"];
/// Header of probability-distribution exports.
pub const DIST_HEADER: [&str; 3] = ["m", "p", "dp"];
/// Header of NQCRB curve exports.
pub const NQCRB_HEADER: [&str; 4] = ["sigma_over_n", "f_numeric", "f_analytic", "f_q"];
/// Header of CFI sweep exports.
pub const SWEEP_HEADER: [&str; 7] = ["scheme", "readout", "sigma", "phi_opt", "f_c", "f_n", "f_q"];
/// Header of hill-climb trace exports.
pub const TRACE_HEADER: [&str; 4] = ["iteration", "f_sigma", "f_zero", "d_h"];
/// Header of bound-certification exports.
pub const CERT_HEADER: [&str; 3] = ["seed", "f_sigma", "bound"];

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header line and one line per row of pre-formatted fields.
pub fn write_rows<W, I, R>(mut w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.as_ref().join(","));
        buf.push('\n');
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

/// Writes an all-numeric table.
pub fn write_table<W, I, R>(w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let formatted = rows
        .into_iter()
        .map(|r| r.as_ref().iter().map(|&x| fmt_num(x)).collect::<Vec<_>>());
    write_rows(w, header, formatted)
}

/// Splits `text` into rows of fields after checking the header line.
///
/// Accepts an optional trailing newline and `\r\n` endings; every row must
/// have exactly as many fields as the header.
pub fn parse_rows<'a>(text: &'a str, expected_header: &[&str]) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let got: Vec<&str> = header.split(',').map(str::trim).collect();
    if got != expected_header {
        return Err(Error::Parse(format!(
            "header mismatch: expected `{}`, found `{}`",
            expected_header.join(","),
            header
        )));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != expected_header.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, found {}",
                k + 2,
                expected_header.len(),
                fields.len()
            )));
        }
        rows.push(fields);
    }
    Ok(rows)
}

/// Parses a finite number; `nan` and `inf` are rejected.
pub fn parse_num(field: &str, line: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse(format!("line {line}: `{field}` is not a finite number"))),
    }
}

/// Parses an all-numeric table.
pub fn parse_table(text: &str, expected_header: &[&str]) -> Result<Vec<Vec<f64>>> {
    parse_rows(text, expected_header)?
        .into_iter()
        .enumerate()
        .map(|(k, row)| row.into_iter().map(|f| parse_num(f, k + 2)).collect())
        .collect()
}
