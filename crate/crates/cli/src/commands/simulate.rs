//! `simulate`: run a force profile through the chain and write the logs.

use std::path::PathBuf;

use clap::Args;

use optotension_core::stream::{stream_simulate, StreamConfig};

use crate::config::{render_header, ModelConfig};
use crate::logio::{self, ReferenceLog, ReferenceRow, SampleLog};
use crate::CliError;

#[derive(Args)]
pub struct SimulateArgs {
    /// Sample rate in Hz (acquisition tops out at 5000).
    #[arg(long, default_value_t = 1000.0)]
    pub rate: f64,

    /// Run length in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,

    /// Force profile: `const:<N>`, `ramp:<N>:<N>[:<s>]`, `triangle:<N>[:<s>]`.
    #[arg(long = "force-profile", default_value = "const:50")]
    pub force_profile: String,

    /// Ambient temperature in degC.
    #[arg(long, default_value_t = 25.0)]
    pub temp: f64,

    /// Sample log destination.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,

    /// Also write the true-force reference log (the load-cell channel).
    #[arg(long = "ref-out", value_name = "CSV")]
    pub ref_out: Option<PathBuf>,
}

pub fn run(model: &ModelConfig, seed: u64, args: SimulateArgs) -> Result<(), CliError> {
    let profile = super::parse_force_profile(&args.force_profile, args.duration)?;
    let chain = model.sensing_chain()?;
    let noise = model.noise(seed)?;
    let config = StreamConfig {
        rate_hz: args.rate,
        duration_s: args.duration,
        temperature_c: args.temp,
        adc: model.adc,
    };
    let stream =
        stream_simulate(&profile, &config, &chain, &noise).map_err(CliError::domain_display)?;

    let mut run_entries = super::base_run_entries("simulate", seed);
    run_entries.push(("rate_hz".to_string(), args.rate.to_string()));
    run_entries.push(("duration_s".to_string(), args.duration.to_string()));
    run_entries.push(("temperature_c".to_string(), args.temp.to_string()));
    run_entries.push((
        "force_profile".to_string(),
        super::profile_spec(&profile),
    ));
    let header = render_header(model, &run_entries);

    let log = SampleLog::from_stream(&stream, &model.adc);
    logio::write_text(&args.out, &log.render(&header))?;

    if let Some(ref_path) = args.ref_out {
        let reference = ReferenceLog {
            comments: Vec::new(),
            rows: (0..stream.samples.len())
                .map(|k| {
                    let time_s = stream.time_s(k);
                    ReferenceRow {
                        time_s,
                        force_n: profile.force_at(time_s),
                    }
                })
                .collect(),
        };
        logio::write_text(&ref_path, &reference.render(&header))?;
    }

    eprintln!(
        "wrote {} samples at {} Hz to {}",
        stream.samples.len(),
        args.rate,
        args.out.display()
    );
    Ok(())
}
