//! Flat-file input and output for relations.
//!
//! The on-disk format is CSV with a header row naming the attributes plus a
//! final column literally `@k` holding the annotation in the instance's
//! literal grammar. A file without an `@k` column annotates every row with
//! the instance's 1. Data cells consisting solely of an optionally signed
//! integer load as integers; everything else loads as a string (so a string
//! value that looks like an integer is not representable here).
//!
//! Saving writes rows in canonical tuple order with canonical annotation
//! text, so load, save, load is stable.

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::{DomVal, KRelation, KrelError, Schema, Tuple};
use crate::instances::Semiring;

pub const ANNOT_COLUMN: &str = "@k";

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("row {row}: bad annotation: {message}")]
    BadAnnotation { row: usize, message: String },
    #[error("{0}")]
    BadHeader(String),
    #[error(transparent)]
    Krel(#[from] KrelError),
}

fn parse_cell(cell: &str) -> DomVal {
    match cell.parse::<i64>() {
        Ok(n) => DomVal::Int(n),
        Err(_) => DomVal::Str(cell.to_string()),
    }
}

/// Read a relation from CSV text.
pub fn load_csv(semiring: Arc<Semiring>, data: &str) -> Result<KRelation, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(data.as_bytes());
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let (attr_names, has_annot) = match headers.split_last() {
        Some((last, rest)) if last == ANNOT_COLUMN => (rest.to_vec(), true),
        _ => (headers.clone(), false),
    };
    if attr_names.is_empty() {
        return Err(IoError::BadHeader(
            "a relation file needs at least one attribute column".into(),
        ));
    }
    if attr_names.iter().any(|a| a == ANNOT_COLUMN) {
        return Err(IoError::BadHeader(format!(
            "`{ANNOT_COLUMN}` may only appear as the final column"
        )));
    }
    let schema = Schema::new(attr_names.clone()).map_err(IoError::Krel)?;
    let mut rows: Vec<(Tuple, crate::instances::Value)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let expected = attr_names.len() + usize::from(has_annot);
        if record.len() != expected {
            return Err(IoError::BadAnnotation {
                row: i + 2,
                message: format!("expected {expected} cells, found {}", record.len()),
            });
        }
        let tuple: Tuple = attr_names
            .iter()
            .zip(record.iter())
            .map(|(a, cell)| (a.clone(), parse_cell(cell)))
            .collect();
        let annot = if has_annot {
            let text = record.get(attr_names.len()).unwrap();
            semiring
                .parse(text)
                .map_err(|e| IoError::BadAnnotation {
                    row: i + 2,
                    message: e.to_string(),
                })?
        } else {
            semiring.one()
        };
        rows.push((tuple, annot));
    }
    KRelation::from_rows(semiring, schema, rows).map_err(IoError::Krel)
}

pub fn load_csv_path(semiring: Arc<Semiring>, path: &Path) -> Result<KRelation, IoError> {
    let data = std::fs::read_to_string(path)?;
    load_csv(semiring, &data)
}

/// Write a relation as CSV, attributes in schema order plus the `@k` column.
pub fn to_csv(rel: &KRelation) -> Result<String, IoError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = rel.schema().attrs().iter().map(|s| s.as_str()).collect();
    header.push(ANNOT_COLUMN);
    writer.write_record(&header)?;
    for (tuple, annot) in rel.rows() {
        let mut record: Vec<String> = rel
            .schema()
            .attrs()
            .iter()
            .map(|a| tuple[a].to_string())
            .collect();
        record.push(rel.semiring().print(annot));
        writer.write_record(&record)?;
    }
    let bytes = writer.into_inner().map_err(|e| {
        IoError::Io(std::io::Error::other(e.to_string()))
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Canonical text rendering: one `(attr=value, ...) : annotation` line per
/// tuple, in tuple order. The empty relation renders as no lines.
pub fn render_text(rel: &KRelation) -> String {
    let mut out = String::new();
    for (tuple, annot) in rel.rows() {
        out.push_str(&render_tuple(rel.schema(), tuple));
        out.push_str(" : ");
        out.push_str(&rel.semiring().print(annot));
        out.push('\n');
    }
    out
}

pub fn render_tuple(schema: &Schema, tuple: &Tuple) -> String {
    let fields: Vec<String> = schema
        .attrs()
        .iter()
        .map(|a| format!("{a}={}", tuple[a]))
        .collect();
    format!("({})", fields.join(", "))
}

/// Line-delimited records with a stable field order, for scripting.
pub fn render_records(rel: &KRelation) -> String {
    let mut out = format!(
        "relation instance={} schema=[{}] rows={}\n",
        rel.semiring().name(),
        rel.schema().display(),
        rel.len()
    );
    for (tuple, annot) in rel.rows() {
        out.push_str(&format!(
            "row {} : {}\n",
            render_tuple(rel.schema(), tuple),
            rel.semiring().print(annot)
        ));
    }
    out
}
