//! Plain-text file formats.
//!
//! * Matrices: comma-separated decimals, one matrix row per line (rows are
//!   feature dimensions, columns are samples), no header. Written with 17
//!   significant digits.
//! * Labels: one positive integer per line.
//! * Predictions: one label per line, `?` for unclassified samples.
//! * Traces: CSV with header `iter,objective,r1,r2,dz,h_diff`.
//! * Manifests: `key=value` lines.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::classifier::Label;
use crate::error::{Error, Result};
use crate::solver::TraceRecord;
use crate::Matrix;

pub const TRACE_HEADER: &str = "iter,objective,r1,r2,dz,h_diff";

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut cols = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(rows + 1);
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                    format!("expected {expected_len} fields, found {len}")
                }
                _ => e.to_string(),
            };
            Error::Parse { line, message }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(rows + 1);
        if rows == 0 {
            cols = record.len();
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("'{field}' is not finite"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "no matrix rows".into(),
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&read_text(path.as_ref())?)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.len() * 24);
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        match token.parse::<usize>() {
            Ok(l) if l > 0 => labels.push(l),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("'{token}' is not a positive integer label"),
                })
            }
        }
    }
    Ok(labels)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    parse_labels(&read_text(path.as_ref())?)
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(path, text)?;
    Ok(())
}

pub fn save_predictions(path: impl AsRef<Path>, pred: &[Label]) -> Result<()> {
    let text: String = pred.iter().map(|l| format!("{l}\n")).collect();
    fs::write(path, text)?;
    Ok(())
}

pub fn parse_predictions(text: &str) -> Result<Vec<Label>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| match l.trim() {
            "?" => Ok(Label::Unclassified),
            t => t
                .parse::<usize>()
                .ok()
                .filter(|v| *v > 0)
                .map(Label::Category)
                .ok_or_else(|| Error::Parse {
                    line: i + 1,
                    message: format!("'{t}' is not a label"),
                }),
        })
        .collect()
}

pub fn format_trace(trace: &[TraceRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.iter, r.objective, r.r1, r.r2, r.dz, r.h_diff
        ));
    }
    out
}

pub fn save_trace(path: impl AsRef<Path>, trace: &[TraceRecord]) -> Result<()> {
    fs::write(path, format_trace(trace))?;
    Ok(())
}

/// Ordered `key=value` record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, got '{line}'"),
            })?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_text(path.as_ref())?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        for (k, v) in &self.entries {
            writeln!(w, "{k}={v}")?;
        }
        w.flush()?;
        Ok(())
    }
}
