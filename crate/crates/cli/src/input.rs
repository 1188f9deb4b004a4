use std::path::Path;

use csv::{ReaderBuilder, Trim};
use lingam_core::detector::MIN_DETECT_N;

use crate::error::{CliError, CliResult};

/// First two columns of a CSV file and their names.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    pub names: [String; 2],
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn number(field: &str) -> Option<f64> {
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the first two columns. A first row that is not numeric in both of
/// those columns is taken as a header.
pub fn read_columns(path: &Path) -> CliResult<Columns> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_path(path)
        .map_err(|e| CliError::MalformedCsv(format!("{}: {e}", path.display())))?;

    let mut names = ["x".to_string(), "y".to_string()];
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::MalformedCsv(e.to_string()))?;
        let line = i + 1;
        if record.len() < 2 {
            return Err(CliError::MalformedCsv(format!(
                "line {line}: expected at least 2 columns, found {}",
                record.len()
            )));
        }
        match (number(&record[0]), number(&record[1])) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ if i == 0 => names = [record[0].to_string(), record[1].to_string()],
            _ => {
                return Err(CliError::MalformedCsv(format!(
                    "line {line}: non-numeric value in `{},{}`",
                    &record[0], &record[1]
                )))
            }
        }
    }
    if x.len() < MIN_DETECT_N {
        return Err(CliError::TooFewRows {
            given: x.len(),
            needed: MIN_DETECT_N,
        });
    }
    Ok(Columns { names, x, y })
}
