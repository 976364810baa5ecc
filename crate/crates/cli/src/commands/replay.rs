//! `replay`: apply a calibration to an existing sample log.

use std::path::PathBuf;

use clap::Args;

use crate::caldoc::{load_json, CalibrationDoc};
use crate::config::{render_header, ModelConfig};
use crate::logio::{self, read_sample_log};
use crate::CliError;

#[derive(Args)]
pub struct ReplayArgs {
    /// Sample log to replay.
    #[arg(long, value_name = "CSV")]
    pub log: PathBuf,

    /// Calibration document.
    #[arg(long, value_name = "JSON")]
    pub cal: PathBuf,

    /// Destination log with the force column filled.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

pub fn run(model: &ModelConfig, seed: u64, args: ReplayArgs) -> Result<(), CliError> {
    let mut log = read_sample_log(&args.log)?;
    let doc: CalibrationDoc = load_json(&args.cal)?;
    let poly = doc.to_poly()?;

    let mut extrapolated = 0usize;
    for row in &mut log.rows {
        let value = poly.eval(row.voltage_v);
        if value.extrapolated {
            extrapolated += 1;
        }
        row.force_n = Some(value.force_n);
    }
    if extrapolated > 0 {
        eprintln!(
            "warning: {extrapolated} of {} rows fall outside the fitted voltage range",
            log.rows.len()
        );
    }

    let mut run_entries = super::base_run_entries("replay", seed);
    run_entries.push(("log".to_string(), args.log.display().to_string()));
    run_entries.push(("cal".to_string(), args.cal.display().to_string()));
    let header = render_header(model, &run_entries);
    logio::write_text(&args.out, &log.render(&header))?;
    eprintln!(
        "wrote {} calibrated rows to {}",
        log.rows.len(),
        args.out.display()
    );
    Ok(())
}
