//! Shared output helpers.

use crate::error::{Error, Result};

/// Shortest decimal that parses back to the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x:?}")
}

/// A possibly undefined cell; undefined prints as `NA`.
pub fn cell(x: Option<f64>) -> String {
    x.map(number).unwrap_or_else(|| "NA".to_string())
}

pub fn csv<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv output: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(format!("csv output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}
