//! CSV and JSON formats.
//!
//! Decision matrices: header row of criterion names, optional first label
//! column, one alternative per row. Set functions: JSON in cardinality order (see
//! [`crate::capacity::SetFunctionJson`]) or CSV with one row per subset.
//! Floats are written in shortest round-trip form, so re-serializing a parsed
//! file reproduces it byte for byte.

use std::io::{Read, Write};
use std::path::Path;

use crate::aggregation::DecisionMatrix;
use crate::error::{Error, Result};
use crate::sobol::SobolReport;
use crate::subset::Criteria;

const LABEL_HEADERS: [&str; 5] = ["label", "alternative", "name", "id", "student"];

/// Reads a decision matrix. With `normalize`, each column is min-max scaled
/// to `[0, 1]`; otherwise every value must already lie in `[0, 1]`.
pub fn read_matrix<R: Read>(reader: R, normalize: bool) -> Result<DecisionMatrix> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
    let records: Vec<csv::StringRecord> = csv.records().collect::<std::result::Result<_, _>>()?;
    if records.is_empty() {
        return Err(Error::Parse("decision matrix has no rows".into()));
    }
    let first_is_label = headers.first().is_some_and(|h| LABEL_HEADERS.contains(&h.to_ascii_lowercase().as_str()))
        || records.iter().any(|r| r.get(0).is_some_and(|v| v.parse::<f64>().is_err()));
    let skip = usize::from(first_is_label);
    let m = headers.len().saturating_sub(skip);

    let mut data = Vec::with_capacity(records.len() * m);
    let mut labels = Vec::new();
    for (i, record) in records.iter().enumerate() {
        if record.len() != headers.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                record.len(),
                headers.len()
            )));
        }
        if first_is_label {
            labels.push(record[0].to_string());
        }
        for (j, field) in record.iter().skip(skip).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}, column {}: {field:?} is not a number", i + 1, j + 1)))?;
            data.push(v);
        }
    }
    let n = records.len();
    let matrix = if normalize {
        DecisionMatrix::min_max_normalized(n, m, data)?
    } else {
        DecisionMatrix::from_row_major(n, m, data)?
    };
    let matrix = matrix.with_criterion_names(headers[skip..].to_vec())?;
    if first_is_label {
        matrix.with_labels(labels)
    } else {
        Ok(matrix)
    }
}

pub fn read_matrix_file(path: &Path, normalize: bool) -> Result<DecisionMatrix> {
    read_matrix(std::fs::File::open(path)?, normalize)
}

pub fn write_matrix<W: Write>(writer: W, matrix: &DecisionMatrix) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = Vec::new();
    if matrix.labels().is_some() {
        header.push("label");
    }
    header.extend(matrix.criterion_names().iter().map(String::as_str));
    csv.write_record(&header)?;
    for (i, row) in matrix.rows().enumerate() {
        let mut record: Vec<String> = Vec::with_capacity(row.len() + 1);
        if let Some(labels) = matrix.labels() {
            record.push(labels[i].clone());
        }
        record.extend(row.iter().map(|&v| fmt_float(v)));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(())
}

/// One row per subset in cardinality order: `subset,<column names…>`, where each
/// column is a set function given by mask-indexed values.
pub fn write_set_functions<W: Write>(writer: W, criteria: Criteria, columns: &[(&str, &[f64])]) -> Result<()> {
    for (name, values) in columns {
        if values.len() != criteria.subset_count() {
            return Err(Error::Dimension { expected: criteria.subset_count(), actual: values.len() })
                .map_err(|e| Error::Parse(format!("column {name}: {e}")));
        }
    }
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["subset"];
    header.extend(columns.iter().map(|(name, _)| *name));
    csv.write_record(&header)?;
    for subset in criteria.cardinality_order() {
        let mut record = vec![subset.to_string()];
        record.extend(columns.iter().map(|(_, values)| fmt_float(values[subset.index()])));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_sobol_reports<W: Write>(writer: W, reports: &[SobolReport]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["subset", "order", "raw", "normalized", "estimator", "n"])?;
    for r in reports {
        csv.write_record([
            r.subset.to_string(),
            r.subset.cardinality().to_string(),
            fmt_float(r.raw_variance),
            r.normalized.map(fmt_float).unwrap_or_default(),
            r.estimator.to_string(),
            r.sample_size.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Shortest round-trip form, with negative zero written as `0` and
/// exponent notation outside `[1e-5, 1e16)`.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
