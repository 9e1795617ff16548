//! Headered CSV input for `fit` and `select`.

use std::path::Path;

use hgbic_core::{Dataset, GlmFamily, Matrix};

use crate::error::CliError;

/// Reads a headered numeric CSV; `response` names the response column and
/// every other column becomes a covariate, in file order.
pub fn read_dataset(path: &Path, response: &str, family: GlmFamily) -> Result<Dataset, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::usage(format!("cannot open input {}: {e}", path.display())))?;
    parse_dataset(file, response, family)
}

pub fn parse_dataset(input: impl std::io::Read, response: &str, family: GlmFamily) -> Result<Dataset, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(|e| CliError::data(format!("bad CSV header: {e}")))?.clone();
    let y_col = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| CliError::data(format!("response column `{response}` not found")))?;
    let names: Vec<String> =
        headers.iter().enumerate().filter(|&(j, _)| j != y_col).map(|(_, h)| h.to_owned()).collect();

    let mut y = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("row {}: {e}", row + 1)))?;
        let mut k = 0;
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                CliError::data(format!("row {}: column `{}` is not numeric: {field:?}", row + 1, &headers[j]))
            })?;
            if j == y_col {
                y.push(value);
            } else {
                columns[k].push(value);
                k += 1;
            }
        }
    }
    let n = y.len();
    let ds = Dataset::new(y, Matrix::from_columns(n, &columns))
        .and_then(|d| d.with_column_names(names))
        .map_err(|e| CliError::from_core("input", e))?;
    ds.validate_for(family).map_err(|e| CliError::from_core("input", e))?;
    Ok(ds)
}
