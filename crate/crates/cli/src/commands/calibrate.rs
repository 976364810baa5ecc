//! `calibrate`: fit the cubic and print the calibration-experiment summary.

use std::path::PathBuf;

use clap::Args;

use optotension_core::calib::{
    self, fit_poly, CalibrationPoly, MetricsReport, RATED_FULL_SCALE_N, STEP_FULL_SCALE_N,
};

use crate::caldoc::{save_json, CalibrationDoc, MetricsDoc};
use crate::config::ModelConfig;
use crate::logio::{read_reference_log, read_sample_log, SampleLog};
use crate::CliError;

/// The reference sweep the calibration procedure covers, in newtons.
pub const CALIBRATION_MAX_FORCE_N: f64 = 70.0;

#[derive(Args)]
pub struct CalibrateArgs {
    /// Sensor sample log (from `simulate` or hardware capture).
    #[arg(long, value_name = "CSV")]
    pub log: PathBuf,

    /// Reference force log, aligned by timestamp.
    #[arg(long = "ref", value_name = "CSV")]
    pub reference: PathBuf,

    /// Polynomial degree of the fit.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,

    /// Optional stationary sample log for the resolution figure.
    #[arg(long, value_name = "CSV")]
    pub stationary: Option<PathBuf>,

    /// Calibration document destination.
    #[arg(long, value_name = "JSON")]
    pub out: PathBuf,

    /// Metrics report destination.
    #[arg(long = "metrics-out", value_name = "JSON")]
    pub metrics_out: Option<PathBuf>,
}

pub fn run(model: &ModelConfig, seed: u64, args: CalibrateArgs) -> Result<(), CliError> {
    let samples = read_sample_log(&args.log)?;
    let reference = read_reference_log(&args.reference)?;
    let pairs = super::align_logs(&samples, &reference)?;

    for &(_, force) in &pairs {
        if !(0.0..=CALIBRATION_MAX_FORCE_N).contains(&force) {
            return Err(CliError::domain(format!(
                "reference force {force} N outside the 0..{CALIBRATION_MAX_FORCE_N} N calibration sweep"
            )));
        }
    }

    let poly = fit_poly(&pairs, args.degree).map_err(CliError::domain_display)?;
    if !poly.monotone_on_fit_range() {
        eprintln!("warning: fitted polynomial is not monotone over the fit range");
    }

    let mut run_entries = super::base_run_entries("calibrate", seed);
    run_entries.push(("degree".to_string(), args.degree.to_string()));
    run_entries.push(("log".to_string(), args.log.display().to_string()));
    run_entries.push(("reference".to_string(), args.reference.display().to_string()));
    let run = super::entries_to_map(&run_entries)
        .into_iter()
        .chain(model.echo_entries())
        .collect();

    let report = build_report(&samples, &pairs, &poly, args.stationary.as_deref())?;

    save_json(&args.out, &CalibrationDoc::from_poly(&poly, run))?;
    if let Some(metrics_path) = &args.metrics_out {
        let run = super::entries_to_map(&run_entries)
            .into_iter()
            .chain(model.echo_entries())
            .collect();
        save_json(metrics_path, &MetricsDoc::from_report(&report, run))?;
    }

    print_summary(&report, &poly);
    Ok(())
}

/// Assembles the metrics report shared by `calibrate` and `metrics`.
pub fn build_report(
    samples: &SampleLog,
    aligned: &[(f64, f64)],
    poly: &CalibrationPoly,
    stationary: Option<&std::path::Path>,
) -> Result<MetricsReport, CliError> {
    let predicted: Vec<f64> = aligned.iter().map(|&(v, _)| poly.force(v)).collect();
    let truth: Vec<f64> = aligned.iter().map(|&(_, f)| f).collect();
    let rmse_n = calib::rmse(&predicted, &truth).map_err(CliError::domain_display)?;

    let curve: Vec<(f64, f64)> = truth.iter().copied().zip(predicted.iter().copied()).collect();
    let (loading, unloading) = super::split_branches(&curve);
    let mut loading_sorted = loading.clone();
    loading_sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nonlinearity_pct = calib::nonlinearity(&loading_sorted, RATED_FULL_SCALE_N)
        .map_err(CliError::domain_display)?;
    let hysteresis_pct = if unloading.len() > 1 {
        calib::hysteresis(&loading, &unloading, RATED_FULL_SCALE_N)
            .map_err(CliError::domain_display)?
    } else {
        0.0
    };

    let (resolution_n, resolution_steps) = match stationary {
        Some(path) => {
            let stationary_log = read_sample_log(path)?;
            let forces: Vec<f64> = stationary_log
                .rows
                .iter()
                .map(|r| poly.force(r.voltage_v))
                .collect();
            let (res, steps) =
                calib::resolution(&forces, STEP_FULL_SCALE_N).map_err(CliError::domain_display)?;
            (Some(res), Some(steps))
        }
        None => (None, None),
    };

    let sample_rate_hz = samples.dt_s().map(|dt| 1.0 / dt).unwrap_or(f64::NAN);
    Ok(MetricsReport {
        rmse_n,
        nonlinearity_pct,
        hysteresis_pct,
        resolution_n,
        resolution_steps,
        full_scale_n: RATED_FULL_SCALE_N,
        sample_rate_hz,
    })
}

pub fn print_summary(report: &MetricsReport, poly: &CalibrationPoly) {
    println!("calibration experiment summary");
    println!("  rmse                {:.4} N", report.rmse_n);
    println!("  nonlinearity        {:.2} %FS", report.nonlinearity_pct);
    println!("  hysteresis          {:.2} %FS", report.hysteresis_pct);
    match (report.resolution_n, report.resolution_steps) {
        (Some(res), Some(steps)) => {
            println!("  standard deviation  {:.3} mN", res * 1e3);
            println!("  resolution          {:.3} mN", res * 1e3);
            println!(
                "  resolution (steps)  {steps} over {} N full scale",
                STEP_FULL_SCALE_N
            );
        }
        _ => {
            println!("  resolution          n/a (no stationary log)");
        }
    }
    println!("  sample rate         {:.0} Hz (max 5000)", report.sample_rate_hz);
    println!(
        "  fit                 degree {} over [{:.4}, {:.4}] V, residual {:.4} N",
        poly.degree(),
        poly.fit_range.0,
        poly.fit_range.1,
        poly.residual_rmse
    );
}
