use std::fs::File;
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Load a headered CSV. The target column is `target_column` when given,
/// otherwise the last column; the remaining columns keep header order.
/// Row numbers in errors count data rows from 1 (the header is not counted).
pub fn load_csv(path: &Path, target_column: Option<&str>) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < 2 {
        return Err(Error::MalformedRow {
            row: 0,
            message: format!("need at least 2 columns, header has {}", header.len()),
        });
    }
    let target_idx = match target_column {
        Some(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownTargetColumn(name.to_string()))?,
        None => header.len() - 1,
    };
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut target = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumericCell {
                    row,
                    column: header[c].clone(),
                    value: cell.to_string(),
                })?;
            if c == target_idx {
                target.push(value);
            } else {
                features.push(value);
            }
        }
    }
    Dataset::from_flat(features, target, names)
}

/// Inverse of [`load_csv`] with the target written as the last column under
/// `target_name`. Values use shortest round-trip formatting.
pub fn write_csv(data: &Dataset, path: &Path, target_name: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let mut header: Vec<&str> = data.names().iter().map(String::as_str).collect();
    header.push(target_name);
    w.write_record(&header).map_err(csv_to_io)?;
    for (row, t) in data.rows().zip(data.target()) {
        let rec: Vec<String> = row
            .iter()
            .chain(std::iter::once(t))
            .map(|v| v.to_string())
            .collect();
        w.write_record(&rec).map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
