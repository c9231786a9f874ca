//! Text formats for series and index lists.
//!
//! A series file holds one value per line, or `index,value` rows. The first
//! line may be a header; it is recognised by failing to parse as a number.
//! Blank lines are ignored. Index lists hold one non-negative integer per line.

use std::fmt::Write as _;

use thiserror::Error as ThisError;

use crate::series::TimeSeries;

/// Parse failure with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

fn looks_like_header(line: &str) -> bool {
    line.split(',').all(|field| field.trim().parse::<f64>().is_err())
}

/// Parses a series in either the one-column or the `index,value` layout.
///
/// In the two-column layout the index of the first row becomes the origin;
/// later indices are not checked for gaps since samples are assumed uniform.
pub fn parse_series(text: &str) -> Result<TimeSeries, ParseError> {
    let mut values = Vec::new();
    let mut origin: Option<i64> = None;
    let mut columns: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if columns.is_none() && values.is_empty() && looks_like_header(line) {
            // only the first non-blank line may be a header
            columns = Some(line.split(',').count());
            if columns == Some(1) || columns == Some(2) {
                continue;
            }
            return Err(ParseError::new(line_no, format!("expected 1 or 2 columns, found {}", columns.unwrap())));
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match (columns, fields.len()) {
            (_, n) if n > 2 => return Err(ParseError::new(line_no, format!("expected 1 or 2 columns, found {n}"))),
            (Some(c), n) if c != n && !values.is_empty() => {
                return Err(ParseError::new(line_no, format!("expected {c} columns, found {n}")))
            }
            _ => columns = Some(fields.len()),
        }
        let value_field = fields[fields.len() - 1];
        let value: f64 =
            value_field.parse().map_err(|_| ParseError::new(line_no, format!("not a number: {value_field:?}")))?;
        if !value.is_finite() {
            return Err(ParseError::new(line_no, format!("non-finite value: {value_field:?}")));
        }
        if fields.len() == 2 && origin.is_none() {
            let idx = fields[0];
            origin = Some(idx.parse().map_err(|_| ParseError::new(line_no, format!("not an integer index: {idx:?}")))?);
        }
        values.push(value);
    }
    let series = TimeSeries::new(values).expect("values checked finite");
    Ok(series.with_origin(origin.unwrap_or(0)))
}

/// Parses one non-negative integer per line; blank lines are skipped.
/// Returns the indices sorted and deduplicated.
pub fn parse_indices(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let idx = line.parse().map_err(|_| ParseError::new(i + 1, format!("not an index: {line:?}")))?;
        out.push(idx);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// One value per line, shortest representation that round-trips.
pub fn format_series(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        writeln!(out, "{v:?}").expect("writing to a String");
    }
    out
}

pub fn format_indices(indices: &[usize]) -> String {
    let mut out = String::new();
    for i in indices {
        writeln!(out, "{i}").expect("writing to a String");
    }
    out
}
