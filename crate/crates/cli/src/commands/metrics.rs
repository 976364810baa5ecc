//! `metrics`: evaluate logs under an existing calibration document.

use std::path::PathBuf;

use clap::Args;

use crate::caldoc::{load_json, save_json, CalibrationDoc, MetricsDoc};
use crate::config::ModelConfig;
use crate::logio::{read_reference_log, read_sample_log};
use crate::CliError;

#[derive(Args)]
pub struct MetricsArgs {
    /// Sensor sample log.
    #[arg(long, value_name = "CSV")]
    pub log: PathBuf,

    /// Reference force log, aligned by timestamp.
    #[arg(long = "ref", value_name = "CSV")]
    pub reference: PathBuf,

    /// Calibration document from `calibrate`.
    #[arg(long, value_name = "JSON")]
    pub cal: PathBuf,

    /// Optional stationary sample log for the resolution figure.
    #[arg(long, value_name = "CSV")]
    pub stationary: Option<PathBuf>,

    /// Metrics report destination.
    #[arg(long, value_name = "JSON")]
    pub out: PathBuf,
}

pub fn run(model: &ModelConfig, seed: u64, args: MetricsArgs) -> Result<(), CliError> {
    let samples = read_sample_log(&args.log)?;
    let reference = read_reference_log(&args.reference)?;
    let doc: CalibrationDoc = load_json(&args.cal)?;
    let poly = doc.to_poly()?;
    let pairs = super::align_logs(&samples, &reference)?;

    let report =
        super::calibrate::build_report(&samples, &pairs, &poly, args.stationary.as_deref())?;

    let mut run_entries = super::base_run_entries("metrics", seed);
    run_entries.push(("log".to_string(), args.log.display().to_string()));
    run_entries.push(("reference".to_string(), args.reference.display().to_string()));
    run_entries.push(("cal".to_string(), args.cal.display().to_string()));
    let run = super::entries_to_map(&run_entries)
        .into_iter()
        .chain(model.echo_entries())
        .collect();

    save_json(&args.out, &MetricsDoc::from_report(&report, run))?;
    super::calibrate::print_summary(&report, &poly);
    Ok(())
}
