//! CSV readers for clustered samples and trajectory panels.

use std::fs::File;
use std::path::Path;

use super::CliError;
use crate::empirical::{ClusteredSample, TrajectoryPanel};

fn open(path: &Path) -> Result<csv::Reader<File>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map(|p| p.line());
    let msg = match line {
        Some(line) => format!("{}: row {line}: {err}", path.display()),
        None => format!("{}: {err}", path.display()),
    };
    if err.is_io_error() {
        CliError::Io(msg)
    } else {
        CliError::Input(msg)
    }
}

fn parse_number(path: &Path, row: u64, column: usize, field: &str) -> Result<f64, CliError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Input(format!(
            "{}: row {row}, column {column}: cannot parse '{field}' as a finite number",
            path.display()
        ))),
    }
}

/// Reads `value,cluster` rows; a lone `value` column puts every row in its
/// own cluster. Rows are numbered from 1 with the header as row 1.
pub fn ingest_clustered_csv(path: &Path) -> Result<ClusteredSample, CliError> {
    let mut reader = open(path)?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let labelled = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["value", "cluster"] => true,
        ["value"] => false,
        [] | [""] => {
            return Err(CliError::Input(format!(
                "{}: row 1: missing header, expected 'value,cluster' or 'value'",
                path.display()
            )))
        }
        _ => {
            return Err(CliError::Input(format!(
                "{}: row 1: header must be 'value,cluster' or 'value', got '{}'",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            )))
        }
    };

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line());
        let value = parse_number(path, row, 1, &record[0])?;
        let label = if labelled {
            record[1].to_owned()
        } else {
            String::new()
        };
        rows.push((value, label));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    let sample = if labelled {
        ClusteredSample::new(rows)
    } else {
        ClusteredSample::iid(rows.into_iter().map(|(v, _)| v))
    };
    sample.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads `time,unit_1,...,unit_n` rows into a panel checked against `k_lip`.
pub fn ingest_trajectory_csv(path: &Path, k_lip: f64) -> Result<TrajectoryPanel, CliError> {
    let mut reader = open(path)?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let n_units = headers.len().saturating_sub(1);
    let well_formed = headers.get(0) == Some("time")
        && n_units > 0
        && headers
            .iter()
            .skip(1)
            .enumerate()
            .all(|(i, h)| h == format!("unit_{}", i + 1));
    if !well_formed {
        return Err(CliError::Input(format!(
            "{}: row 1: header must be 'time,unit_1,...,unit_n', got '{}'",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut times = Vec::new();
    let mut units = vec![Vec::new(); n_units];
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line());
        times.push(parse_number(path, row, 1, &record[0])?);
        for (u, unit) in units.iter_mut().enumerate() {
            unit.push(parse_number(path, row, u + 2, &record[u + 1])?);
        }
    }
    if times.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    TrajectoryPanel::new(times, units, k_lip)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
