//! JSON documents: calibration polynomials, metrics reports, run summaries.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use optotension_core::calib::{CalibrationPoly, MetricsReport};
use optotension_core::control::{ExperimentOutcome, SteadyStateError};

use crate::CliError;

/// Serialized calibration: degree, coefficients in force units per volt^k,
/// fitted voltage range, and the training residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationDoc {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub fit_range_v: [f64; 2],
    pub residual_rmse_n: f64,
    /// Fully resolved run configuration for reproducibility.
    #[serde(default)]
    pub run: BTreeMap<String, String>,
}

impl CalibrationDoc {
    pub fn from_poly(poly: &CalibrationPoly, run: BTreeMap<String, String>) -> Self {
        Self {
            degree: poly.degree(),
            coefficients: poly.coefficients.clone(),
            fit_range_v: [poly.fit_range.0, poly.fit_range.1],
            residual_rmse_n: poly.residual_rmse,
            run,
        }
    }

    pub fn to_poly(&self) -> Result<CalibrationPoly, CliError> {
        if self.coefficients.len() != self.degree + 1 {
            return Err(CliError::domain(format!(
                "calibration document degree {} disagrees with {} coefficients",
                self.degree,
                self.coefficients.len()
            )));
        }
        let [lo, hi] = self.fit_range_v;
        if lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(CliError::domain(
                "calibration document has an empty fit range".to_string(),
            ));
        }
        Ok(CalibrationPoly {
            coefficients: self.coefficients.clone(),
            fit_range: (self.fit_range_v[0], self.fit_range_v[1]),
            residual_rmse: self.residual_rmse_n,
        })
    }
}

/// Serialized metrics report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub rmse_n: f64,
    pub nonlinearity_pct: f64,
    pub hysteresis_pct: f64,
    pub resolution_n: Option<f64>,
    pub resolution_steps: Option<u64>,
    pub full_scale_n: f64,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub run: BTreeMap<String, String>,
}

impl MetricsDoc {
    pub fn from_report(report: &MetricsReport, run: BTreeMap<String, String>) -> Self {
        Self {
            rmse_n: report.rmse_n,
            nonlinearity_pct: report.nonlinearity_pct,
            hysteresis_pct: report.hysteresis_pct,
            resolution_n: report.resolution_n,
            resolution_steps: report.resolution_steps,
            full_scale_n: report.full_scale_n,
            sample_rate_hz: report.sample_rate_hz,
            run,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteadySegmentDoc {
    pub level_n: f64,
    pub window_s: [f64; 2],
    pub mean_error_n: f64,
}

/// Serialized control-experiment summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlSummaryDoc {
    pub profile: String,
    /// Null for an empty run (RMSE not applicable).
    pub rmse_n: Option<f64>,
    pub steady_state: Vec<SteadySegmentDoc>,
    pub rising_edges: Option<u32>,
    pub trials: Option<u32>,
    pub ticks: usize,
    pub aborted: Option<String>,
    #[serde(default)]
    pub run: BTreeMap<String, String>,
}

impl ControlSummaryDoc {
    pub fn from_outcome(
        profile: String,
        trials: Option<u32>,
        outcome: &ExperimentOutcome,
        run: BTreeMap<String, String>,
    ) -> Self {
        let seg = |s: &SteadyStateError| SteadySegmentDoc {
            level_n: s.level_n,
            window_s: [s.window_start_s, s.window_end_s],
            mean_error_n: s.mean_error_n,
        };
        Self {
            profile,
            rmse_n: outcome.summary.rmse_n,
            steady_state: outcome.summary.steady_state.iter().map(seg).collect(),
            rising_edges: outcome.summary.rising_edges,
            trials,
            ticks: outcome.trajectory.len(),
            aborted: outcome.abort.as_ref().map(|e| e.to_string()),
            run,
        }
    }
}

pub fn save_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::domain(format!("cannot serialize document: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::domain(format!("{}: malformed document: {e}", path.display())))
}
