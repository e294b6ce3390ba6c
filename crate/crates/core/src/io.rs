//! CSV ingestion of two-study p-value tables.
//!
//! Accepted headers are `feature_id,p1,p2` for one-sided p-values and
//! `feature_id,p1_left,p2_left` for left-sided p-values.

use std::io::Read;

use crate::error::{Error, Result};
use crate::model::{PValueMode, TwoStudyPValues};

pub const ONE_SIDED_HEADER: [&str; 3] = ["feature_id", "p1", "p2"];
pub const LEFT_SIDED_HEADER: [&str; 3] = ["feature_id", "p1_left", "p2_left"];

fn expected_header(mode: PValueMode) -> [&'static str; 3] {
    match mode {
        PValueMode::OneSided => ONE_SIDED_HEADER,
        PValueMode::LeftSided => LEFT_SIDED_HEADER,
    }
}

/// Reads a p-value table. Returns `Ok(None)` for a file without data rows.
pub fn read_pvalues<R: Read>(reader: R, mode: PValueMode) -> Result<Option<TwoStudyPValues>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let expected = expected_header(mode);

    let mut ids = Vec::new();
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut saw_header = false;
    for record in csv.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if !saw_header {
            let got: Vec<&str> = record.iter().collect();
            if got != expected {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "expected header `{}`, found `{}`",
                        expected.join(","),
                        got.join(",")
                    ),
                });
            }
            saw_header = true;
            continue;
        }
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let parse = |field: &str, column: &str| -> Result<f64> {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number `{field}` in column {column}"),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Parse {
                    line,
                    message: format!("p-value out of range: {value} in column {column}"),
                });
            }
            Ok(value)
        };
        ids.push(record[0].to_string());
        p1.push(parse(&record[1], expected[1])?);
        p2.push(parse(&record[2], expected[2])?);
    }

    if ids.is_empty() {
        return Ok(None);
    }
    TwoStudyPValues::new(p1, p2, mode, Some(ids)).map(Some)
}

/// Parses a table held in memory.
pub fn parse_pvalues(text: &str, mode: PValueMode) -> Result<Option<TwoStudyPValues>> {
    read_pvalues(text.as_bytes(), mode)
}
