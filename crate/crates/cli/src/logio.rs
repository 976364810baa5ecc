//! CSV log formats: sample logs, reference logs, trajectories, sweep tables.
//!
//! All files open with `# key = value` comment lines echoing the resolved run
//! configuration, then a fixed header row. Floats are written with Rust's
//! shortest-round-trip formatting, so a written file parses back to exactly
//! the same values.

use std::fmt::Write as _;
use std::path::Path;

use optotension_core::adc::{counts_to_voltage, AdcConfig};
use optotension_core::stream::SampleStream;

use crate::CliError;

pub const SAMPLE_LOG_HEADER: &str = "time_s,counts,voltage_v,force_n";
pub const REFERENCE_LOG_HEADER: &str = "time_s,force_n";
pub const TRAJECTORY_HEADER: &str = "time_s,reference_n,measured_n,command";
pub const SWEEP_HEADER: &str = "param_values,half_dx_m,stiffness_n_per_m,allowable";

/// One acquisition row; `force_n` stays empty until a calibration is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub time_s: f64,
    pub counts: u16,
    pub voltage_v: f64,
    pub force_n: Option<f64>,
}

/// A parsed sample log: echoed configuration entries plus rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLog {
    pub comments: Vec<(String, String)>,
    pub rows: Vec<SampleRow>,
}

impl SampleLog {
    /// Converts a simulated stream (decoding counts back to volts).
    pub fn from_stream(stream: &SampleStream, adc: &AdcConfig) -> Self {
        let rows = stream
            .samples
            .iter()
            .map(|s| SampleRow {
                time_s: s.timestamp_us as f64 * 1e-6,
                counts: s.counts,
                voltage_v: counts_to_voltage(u32::from(s.counts), adc)
                    .expect("stream counts fit the ADC"),
                force_n: None,
            })
            .collect();
        Self {
            comments: Vec::new(),
            rows,
        }
    }

    /// Sample period inferred from the first two rows.
    pub fn dt_s(&self) -> Option<f64> {
        if self.rows.len() < 2 {
            return None;
        }
        Some(self.rows[1].time_s - self.rows[0].time_s)
    }

    pub fn render(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str(SAMPLE_LOG_HEADER);
        out.push('\n');
        for row in &self.rows {
            let force = row.force_n.map(|f| f.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.time_s, row.counts, row.voltage_v, force
            );
        }
        out
    }
}

/// Reference-channel row (the load-cell side of a calibration run).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub time_s: f64,
    pub force_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLog {
    pub comments: Vec<(String, String)>,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceLog {
    pub fn render(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str(REFERENCE_LOG_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{},{}", row.time_s, row.force_n);
        }
        out
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(text.lines().map(str::to_string).collect())
}

struct CsvBody {
    comments: Vec<(String, String)>,
    /// (1-based line number, raw row) pairs after the header.
    rows: Vec<(usize, String)>,
}

fn parse_csv(path: &Path, expected_header: &str) -> Result<CsvBody, CliError> {
    let lines = read_lines(path)?;
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                comments.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != expected_header {
                return Err(CliError::domain(format!(
                    "{}:{lineno}: expected header `{expected_header}`, found `{line}`",
                    path.display()
                )));
            }
            header_seen = true;
            continue;
        }
        rows.push((lineno, line.clone()));
    }
    if !header_seen {
        return Err(CliError::domain(format!(
            "{}: missing header `{expected_header}`",
            path.display()
        )));
    }
    Ok(CsvBody { comments, rows })
}

fn field_error(path: &Path, lineno: usize, what: &str, value: &str) -> CliError {
    CliError::domain(format!(
        "{}:{lineno}: malformed {what}: `{value}`",
        path.display()
    ))
}

/// Reads a sample log; exact inverse of [`SampleLog::render`] on files it
/// wrote. Malformed rows report their line number.
pub fn read_sample_log(path: &Path) -> Result<SampleLog, CliError> {
    let body = parse_csv(path, SAMPLE_LOG_HEADER)?;
    let mut rows = Vec::with_capacity(body.rows.len());
    for (lineno, line) in &body.rows {
        let mut fields = line.split(',');
        let mut next = |what: &str| {
            fields
                .next()
                .ok_or_else(|| field_error(path, *lineno, what, line))
        };
        let time_s: f64 = next("time_s")?
            .parse()
            .map_err(|_| field_error(path, *lineno, "time_s", line))?;
        let counts: u16 = next("counts")?
            .parse()
            .map_err(|_| field_error(path, *lineno, "counts", line))?;
        let voltage_v: f64 = next("voltage_v")?
            .parse()
            .map_err(|_| field_error(path, *lineno, "voltage_v", line))?;
        let force_field = next("force_n")?;
        let force_n = if force_field.is_empty() {
            None
        } else {
            Some(
                force_field
                    .parse()
                    .map_err(|_| field_error(path, *lineno, "force_n", line))?,
            )
        };
        if fields.next().is_some() {
            return Err(field_error(path, *lineno, "row (extra fields)", line));
        }
        rows.push(SampleRow {
            time_s,
            counts,
            voltage_v,
            force_n,
        });
    }
    Ok(SampleLog {
        comments: body.comments,
        rows,
    })
}

pub fn read_reference_log(path: &Path) -> Result<ReferenceLog, CliError> {
    let body = parse_csv(path, REFERENCE_LOG_HEADER)?;
    let mut rows = Vec::with_capacity(body.rows.len());
    for (lineno, line) in &body.rows {
        let Some((t, f)) = line.split_once(',') else {
            return Err(field_error(path, *lineno, "row", line));
        };
        let time_s: f64 = t
            .parse()
            .map_err(|_| field_error(path, *lineno, "time_s", line))?;
        let force_n: f64 = f
            .parse()
            .map_err(|_| field_error(path, *lineno, "force_n", line))?;
        rows.push(ReferenceRow { time_s, force_n });
    }
    Ok(ReferenceLog {
        comments: body.comments,
        rows,
    })
}
