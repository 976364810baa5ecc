//! Subcommand implementations and the small parsers they share.

pub mod calibrate;
pub mod control;
pub mod frame;
pub mod metrics;
pub mod replay;
pub mod simulate;
pub mod sweep;

use std::collections::BTreeMap;

use optotension_core::stream::ForceProfile;

use crate::logio::{ReferenceLog, SampleLog};
use crate::CliError;

/// Parses `const:50`, `ramp:0:70[:duration]`, `triangle:70[:period]`.
///
/// Ramp and triangle default their time parameter to the run duration.
pub fn parse_force_profile(spec: &str, run_duration_s: f64) -> Result<ForceProfile, CliError> {
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or("");
    let nums: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::usage(format!("force profile: `{p}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    match (kind, nums.as_slice()) {
        ("const", [force_n]) => Ok(ForceProfile::Constant { force_n: *force_n }),
        ("ramp", [start_n, end_n]) => Ok(ForceProfile::Ramp {
            start_n: *start_n,
            end_n: *end_n,
            duration_s: run_duration_s,
        }),
        ("ramp", [start_n, end_n, duration_s]) => Ok(ForceProfile::Ramp {
            start_n: *start_n,
            end_n: *end_n,
            duration_s: *duration_s,
        }),
        ("triangle", [peak_n]) => Ok(ForceProfile::Triangle {
            peak_n: *peak_n,
            period_s: run_duration_s,
        }),
        ("triangle", [peak_n, period_s]) => Ok(ForceProfile::Triangle {
            peak_n: *peak_n,
            period_s: *period_s,
        }),
        _ => Err(CliError::usage(format!(
            "unknown force profile `{spec}`; expected const:<N>, ramp:<N>:<N>[:<s>], or triangle:<N>[:<s>]"
        ))),
    }
}

/// Renders a force profile back into its flag spelling for the echo header.
pub fn profile_spec(profile: &ForceProfile) -> String {
    match profile {
        ForceProfile::Constant { force_n } => format!("const:{force_n}"),
        ForceProfile::Ramp {
            start_n,
            end_n,
            duration_s,
        } => format!("ramp:{start_n}:{end_n}:{duration_s}"),
        ForceProfile::Triangle { peak_n, period_s } => format!("triangle:{peak_n}:{period_s}"),
    }
}

/// Parses a length with an optional unit suffix: `2mm`, `450um`, `0.002m`,
/// bare numbers are meters.
pub fn parse_length_m(text: &str) -> Result<f64, CliError> {
    let text = text.trim();
    let (number, factor) = if let Some(t) = text.strip_suffix("mm") {
        (t, 1e-3)
    } else if let Some(t) = text.strip_suffix("um") {
        (t, 1e-6)
    } else if let Some(t) = text.strip_suffix('m') {
        (t, 1.0)
    } else {
        (text, 1.0)
    };
    number
        .trim()
        .parse::<f64>()
        .map(|v| v * factor)
        .map_err(|_| CliError::usage(format!("`{text}` is not a length")))
}

/// Aligns sample rows to reference rows by nearest timestamp.
///
/// Every sample must find a reference within half the sample period;
/// otherwise the first unmatched timestamp is reported.
pub fn align_logs(
    samples: &SampleLog,
    reference: &ReferenceLog,
) -> Result<Vec<(f64, f64)>, CliError> {
    if samples.rows.is_empty() {
        return Err(CliError::domain("sample log has no rows"));
    }
    if reference.rows.is_empty() {
        return Err(CliError::domain("reference log has no rows"));
    }
    let dt = samples.dt_s().unwrap_or(1e-3);
    let half = dt / 2.0;
    let times: Vec<f64> = reference.rows.iter().map(|r| r.time_s).collect();
    let mut pairs = Vec::with_capacity(samples.rows.len());
    for row in &samples.rows {
        let idx = match times.binary_search_by(|t| t.total_cmp(&row.time_s)) {
            Ok(i) => i,
            Err(i) => {
                // Nearest of the two neighbours.
                if i == 0 {
                    0
                } else if i == times.len() {
                    times.len() - 1
                } else if (times[i] - row.time_s).abs() < (row.time_s - times[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        let gap = (times[idx] - row.time_s).abs();
        if gap > half {
            return Err(CliError::domain(format!(
                "alignment failed: no reference sample within {half} s of t = {} s",
                row.time_s
            )));
        }
        pairs.push((row.voltage_v, reference.rows[idx].force_n));
    }
    Ok(pairs)
}

/// A `(reference force, measured force)` curve.
pub type Branch = Vec<(f64, f64)>;

/// Splits an aligned `(reference, measured)` series at its reference peak
/// into loading and unloading branches, both ascending in reference force.
pub fn split_branches(curve: &[(f64, f64)]) -> (Branch, Branch) {
    if curve.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let peak = curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let loading = curve[..=peak].to_vec();
    let mut unloading = curve[peak..].to_vec();
    unloading.reverse();
    (loading, unloading)
}

/// Standard run entries every command echoes ahead of the model config.
pub fn base_run_entries(command: &str, seed: u64) -> Vec<(String, String)> {
    vec![
        ("command".to_string(), command.to_string()),
        ("seed".to_string(), seed.to_string()),
    ]
}

pub fn entries_to_map(entries: &[(String, String)]) -> BTreeMap<String, String> {
    entries.iter().cloned().collect()
}
