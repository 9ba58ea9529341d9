//! File formats.
//!
//! Matrices come in as CSV (one row per zonotope dimension, no header) or
//! JSON (`{"n":…, "m":…, "entries": row-major flat array}`). Vertex sets go
//! out as CSV with the `m` sign columns first (as +-1 integers) and the `n`
//! coordinates after, printed with 17 significant digits. Enumeration
//! results serialize to JSON with the trace inline and the vertices either
//! inline or as a path to a separately written CSV. Experiment outputs embed
//! the spec as `#`-prefixed provenance comment lines so runs are
//! self-describing.

use std::fmt::Write as FmtWrite;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::experiments::{
    ErrorTraceReport, MeasureMapReport, StoppingHistogram, TimingRow,
};
use crate::matrix::{GeneratorMatrix, ValidationError};
use crate::oracle::MeasureEstimate;
use crate::sampler::{EnumerationResult, TerminationReason};
use crate::vertex::VertexSet;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Matrix CSV: `n` rows, `m` comma-separated entries each, no header.
pub fn read_matrix_csv(path: &Path) -> Result<GeneratorMatrix, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(record.len());
        for (column, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                format_err(
                    path,
                    format!("row {}, column {}: not a number: {field:?}", line + 1, column + 1),
                )
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err(path, "matrix file is empty"));
    }
    Ok(GeneratorMatrix::from_rows(&rows)?)
}

#[derive(Deserialize)]
struct MatrixJson {
    n: usize,
    m: usize,
    entries: Vec<f64>,
}

/// Matrix JSON: `{"n":…, "m":…, "entries": row-major flat array}`.
pub fn read_matrix_json(path: &Path) -> Result<GeneratorMatrix, IoError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let parsed: MatrixJson = serde_json::from_str(&text)?;
    if parsed.entries.len() != parsed.n * parsed.m {
        return Err(format_err(
            path,
            format!(
                "entries has {} values, expected n*m = {}",
                parsed.entries.len(),
                parsed.n * parsed.m
            ),
        ));
    }
    Ok(GeneratorMatrix::from_row_major(
        parsed.n,
        parsed.m,
        &parsed.entries,
    )?)
}

/// Dispatch on extension: `.json` is JSON, anything else CSV.
pub fn read_matrix_auto(path: &Path) -> Result<GeneratorMatrix, IoError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_matrix_json(path),
        _ => read_matrix_csv(path),
    }
}

/// 17 significant digits, `-0` normalized away so negated zero coordinates
/// don't leak sign noise into otherwise identical outputs.
fn fmt_f64(value: f64) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.16e}")
}

/// Vertex CSV: one row per vertex including negations, canonical pair order,
/// `+v` before `-v`; `m` sign columns then `n` coordinate columns.
pub fn write_vertices_csv<W: Write>(out: &mut W, set: &VertexSet) -> Result<(), IoError> {
    for vertex in set.iter() {
        write_vertex_row(out, vertex.key().signs(), vertex.point())?;
        let negated_signs: Vec<i8> = vertex.key().signs().iter().map(|&s| -s).collect();
        write_vertex_row(out, &negated_signs, &vertex.negated_point())?;
    }
    Ok(())
}

fn write_vertex_row<W: Write>(out: &mut W, signs: &[i8], point: &[f64]) -> Result<(), IoError> {
    let mut row = String::new();
    for &s in signs {
        let _ = write!(row, "{s},");
    }
    let mut first = true;
    for &c in point {
        if !first {
            row.push(',');
        }
        first = false;
        row.push_str(&fmt_f64(c));
    }
    row.push('\n');
    out.write_all(row.as_bytes())?;
    Ok(())
}

pub fn vertices_csv_string(set: &VertexSet) -> String {
    let mut buf = Vec::new();
    write_vertices_csv(&mut buf, set).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

fn termination_label(reason: TerminationReason) -> &'static str {
    match reason {
        TerminationReason::TargetCount => "full_enumeration",
        TerminationReason::SampleBudget => "fixed_samples",
        TerminationReason::Streak => "no_new_vertex_streak",
        TerminationReason::SafetyCap => "safety_cap",
    }
}

/// How the `vertices` field of the result JSON is populated.
pub enum VerticesOutput<'a> {
    Inline,
    /// Reference a CSV written elsewhere.
    Path(&'a str),
}

/// Result JSON: `{"samples_used":…, "terminated_by":…, "vertices": …,
/// "trace": [[sample_index, num_vertices],…]}`.
pub fn enumeration_json(result: &EnumerationResult, vertices: VerticesOutput) -> Value {
    let vertices_value = match vertices {
        VerticesOutput::Path(path) => Value::String(path.to_string()),
        VerticesOutput::Inline => Value::Array(
            result
                .vertices
                .iter()
                .flat_map(|v| {
                    let plus: Vec<Value> = v
                        .key()
                        .signs()
                        .iter()
                        .map(|&s| json!(s))
                        .chain(v.point().iter().map(|&c| json!(c)))
                        .collect();
                    let minus: Vec<Value> = v
                        .key()
                        .signs()
                        .iter()
                        .map(|&s| json!(-s))
                        .chain(v.negated_point().iter().map(|&c| json!(c)))
                        .collect();
                    [Value::Array(plus), Value::Array(minus)]
                })
                .collect(),
        ),
    };
    json!({
        "samples_used": result.samples_used,
        "terminated_by": termination_label(result.terminated_by),
        "vertices": vertices_value,
        "trace": result
            .trace
            .iter()
            .map(|t| json!([t.sample_index, t.vertices_found]))
            .collect::<Vec<Value>>(),
    })
}

pub fn write_enumeration_json<W: Write>(
    out: &mut W,
    result: &EnumerationResult,
    vertices: VerticesOutput,
) -> Result<(), IoError> {
    let value = enumeration_json(result, vertices);
    serde_json::to_writer_pretty(&mut *out, &value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Measure CSV: `m` sign columns, then estimate and standard error; the
/// unmatched mass goes into a trailing comment.
pub fn write_measure_csv<W: Write>(
    out: &mut W,
    set: &VertexSet,
    estimate: &MeasureEstimate,
) -> Result<(), IoError> {
    writeln!(out, "# samples={}", estimate.samples())?;
    for vertex in set.iter() {
        let mut row = String::new();
        for &s in vertex.key().signs() {
            let _ = write!(row, "{s},");
        }
        let _ = write!(
            row,
            "{},{}",
            fmt_f64(estimate.estimate(vertex.key())),
            fmt_f64(estimate.standard_error(vertex.key()))
        );
        writeln!(out, "{row}")?;
    }
    writeln!(out, "# other={}", fmt_f64(estimate.other_estimate()))?;
    Ok(())
}

pub fn write_error_trace_csv<W: Write>(
    out: &mut W,
    report: &ErrorTraceReport,
) -> Result<(), IoError> {
    writeln!(out, "# zonotope error-trace experiment")?;
    writeln!(out, "# {}", report.spec.provenance())?;
    writeln!(out, "# ground_truth_exact={}", report.ground_truth_exact)?;
    writeln!(out, "trial,samples,vertices_found,error,exact_zero")?;
    for (trial, rows) in report.trials.iter().enumerate() {
        for row in rows {
            writeln!(
                out,
                "{trial},{},{},{},{}",
                row.samples,
                row.vertices_found,
                fmt_f64(row.error),
                row.exact_zero
            )?;
        }
    }
    Ok(())
}

pub fn write_histogram_csv<W: Write>(
    out: &mut W,
    histogram: &StoppingHistogram,
) -> Result<(), IoError> {
    writeln!(out, "# zonotope stopping-histogram experiment")?;
    writeln!(out, "# {}", histogram.spec.provenance())?;
    writeln!(
        out,
        "# completed={} censored={} mean={} std={} min={} max={}",
        histogram.completed.len(),
        histogram.censored,
        fmt_f64(histogram.mean),
        fmt_f64(histogram.std_dev),
        histogram.min,
        histogram.max
    )?;
    writeln!(out, "trial,samples_to_completion")?;
    for (trial, samples) in histogram.completed.iter().enumerate() {
        writeln!(out, "{trial},{samples}")?;
    }
    Ok(())
}

pub fn write_timing_csv<W: Write>(out: &mut W, row: &TimingRow) -> Result<(), IoError> {
    writeln!(out, "# zonotope timing experiment")?;
    writeln!(out, "# {}", row.spec.provenance())?;
    writeln!(out, "m,n,trials,mean_seconds,std_dev_seconds,censored")?;
    writeln!(
        out,
        "{},{},{},{},{},{}",
        row.spec.m,
        row.spec.n,
        row.trials,
        fmt_f64(row.mean_seconds),
        fmt_f64(row.std_dev_seconds),
        row.censored
    )?;
    Ok(())
}

pub fn write_measure_map_csv<W: Write>(
    out: &mut W,
    report: &MeasureMapReport,
) -> Result<(), IoError> {
    writeln!(out, "# zonotope measure-map experiment")?;
    writeln!(out, "# {}", report.spec.provenance())?;
    writeln!(
        out,
        "# samples={} other={}",
        report.samples,
        fmt_f64(report.other_mass)
    )?;
    for row in &report.rows {
        let mut line = String::new();
        for &s in row.key.signs() {
            let _ = write!(line, "{s},");
        }
        for &c in &row.point {
            let _ = write!(line, "{},", fmt_f64(c));
        }
        let _ = write!(
            line,
            "{},{},{}",
            fmt_f64(row.pair_mass),
            fmt_f64(row.std_error),
            fmt_f64(row.simplicial_constant)
        );
        writeln!(out, "{line}")?;
    }
    Ok(())
}
