//! CSV observation input.

use std::path::Path;

use ockham::ObservationSet;

use crate::error::CliError;

/// Reads a CSV with header `y` or `x,y`. Data rows are numbered from 1.
pub fn read_observations(path: &Path) -> Result<ObservationSet, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: cannot read header: {e}", path.display())))?
        .clone();
    let columns: Vec<&str> = headers.iter().collect();
    let has_x = match columns.as_slice() {
        ["y"] => false,
        ["x", "y"] => true,
        _ => {
            return Err(CliError::Data(format!(
                "{}: header must be 'y' or 'x,y', found '{}'",
                path.display(),
                columns.join(",")
            )))
        }
    };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Data(format!("{}: row {row}: {e}", path.display())))?;
        let mut values = Vec::with_capacity(columns.len());
        for (field, name) in record.iter().zip(&columns) {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CliError::Data(format!(
                        "{}: row {row}: column '{name}' value '{field}' is not a finite number",
                        path.display()
                    )))
                }
            }
        }
        if has_x {
            xs.push(values[0]);
            ys.push(values[1]);
        } else {
            ys.push(values[0]);
        }
    }
    if ys.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(if has_x {
        ObservationSet::with_covariate(xs, ys)?
    } else {
        ObservationSet::new(ys)?
    })
}
