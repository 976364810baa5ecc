//! `control`: closed-loop experiment against the twisted-string actuator.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use optotension_core::control::{
    run_experiment, ExperimentConfig, ForceSensor, ReferenceProfile,
};

use crate::caldoc::{load_json, save_json, CalibrationDoc, ControlSummaryDoc};
use crate::config::{render_header, ModelConfig};
use crate::logio::{self, TRAJECTORY_HEADER};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    /// Step levels of increasing force.
    Staircase,
    /// Repeated rest-then-step cycles.
    RepeatedStep,
    /// Rectified sine tracking.
    RectifiedSine,
}

#[derive(Args)]
pub struct ControlArgs {
    /// Reference profile to track.
    #[arg(long, value_enum)]
    pub profile: ProfileKind,

    /// Calibration document; measured force is poly(decoded voltage).
    #[arg(long, value_name = "JSON")]
    pub cal: PathBuf,

    /// Run length in seconds (defaults to the profile's natural length;
    /// required for rectified-sine).
    #[arg(long)]
    pub duration: Option<f64>,

    /// Control loop rate in Hz.
    #[arg(long, default_value_t = 1000.0)]
    pub rate: f64,

    /// Ambient temperature in degC.
    #[arg(long, default_value_t = 25.0)]
    pub temp: f64,

    /// Staircase levels in newtons.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
    pub levels: Vec<f64>,

    /// Staircase dwell per level in seconds.
    #[arg(long, default_value_t = 3.0)]
    pub dwell: f64,

    /// Repeated-step amplitude in newtons.
    #[arg(long, default_value_t = 30.0)]
    pub amplitude: f64,

    /// Repeated-step trial count.
    #[arg(long, default_value_t = 10)]
    pub trials: u32,

    /// Repeated-step period in seconds.
    #[arg(long, default_value_t = 3.0)]
    pub period: f64,

    /// Rectified-sine amplitude in newtons.
    #[arg(long = "sine-amplitude", default_value_t = 20.0)]
    pub sine_amplitude: f64,

    /// Rectified-sine frequency in Hz.
    #[arg(long, default_value_t = 0.5)]
    pub frequency: f64,

    /// Trajectory log destination.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,

    /// Run summary destination.
    #[arg(long = "summary-out", value_name = "JSON")]
    pub summary_out: Option<PathBuf>,
}

pub fn run(model: &ModelConfig, seed: u64, args: ControlArgs) -> Result<(), CliError> {
    let profile = match args.profile {
        ProfileKind::Staircase => ReferenceProfile::Staircase {
            levels: args.levels.clone(),
            dwell_s: args.dwell,
        },
        ProfileKind::RepeatedStep => ReferenceProfile::RepeatedStep {
            amplitude_n: args.amplitude,
            trials: args.trials,
            period_s: args.period,
        },
        ProfileKind::RectifiedSine => ReferenceProfile::RectifiedSine {
            amplitude_n: args.sine_amplitude,
            frequency_hz: args.frequency,
        },
    };

    let cal_doc: CalibrationDoc = load_json(&args.cal)?;
    let sensor = ForceSensor {
        chain: model.sensing_chain()?,
        adc: model.adc,
        noise: model.noise(seed)?,
        poly: cal_doc.to_poly()?,
    };
    let mut plant = model.tsa_plant()?;
    let mut controller = model.pi_controller(1.0 / args.rate)?;
    let config = ExperimentConfig {
        duration_s: args.duration,
        control_rate_hz: args.rate,
        temperature_c: args.temp,
        settle_s: 1.0,
    };

    let outcome = run_experiment(&profile, &mut plant, &mut controller, &sensor, &config)
        .map_err(CliError::domain_display)?;

    let profile_name = match args.profile {
        ProfileKind::Staircase => "staircase",
        ProfileKind::RepeatedStep => "repeated-step",
        ProfileKind::RectifiedSine => "rectified-sine",
    };
    let mut run_entries = super::base_run_entries("control", seed);
    run_entries.push(("profile".to_string(), profile_name.to_string()));
    run_entries.push(("rate_hz".to_string(), args.rate.to_string()));
    run_entries.push(("temperature_c".to_string(), args.temp.to_string()));
    if let Some(d) = args.duration {
        run_entries.push(("duration_s".to_string(), d.to_string()));
    }
    run_entries.push(("cal".to_string(), args.cal.display().to_string()));

    // Trajectory CSV, kept even when the run aborted mid-way.
    let mut text = render_header(model, &run_entries);
    text.push_str(TRAJECTORY_HEADER);
    text.push('\n');
    for p in &outcome.trajectory {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            p.time_s, p.reference_n, p.measured_n, p.command
        );
    }
    logio::write_text(&args.out, &text)?;

    let trials = match args.profile {
        ProfileKind::RepeatedStep => Some(args.trials),
        _ => None,
    };
    let summary = ControlSummaryDoc::from_outcome(
        profile_name.to_string(),
        trials,
        &outcome,
        super::entries_to_map(&run_entries)
            .into_iter()
            .chain(model.echo_entries())
            .collect(),
    );
    if let Some(path) = &args.summary_out {
        save_json(path, &summary)?;
    }

    println!("control experiment: {profile_name}");
    match summary.rmse_n {
        Some(r) => println!("  rmse        {r:.4} N over {} ticks", summary.ticks),
        None => println!("  rmse        n/a (empty run)"),
    }
    if let Some(edges) = summary.rising_edges {
        println!(
            "  trials      {} requested, {edges} rising edges observed",
            args.trials
        );
    }
    for seg in &summary.steady_state {
        println!(
            "  level {:6.2} N: steady-state error {:+.4} mN over [{:.2}, {:.2}] s",
            seg.level_n,
            seg.mean_error_n * 1e3,
            seg.window_s[0],
            seg.window_s[1]
        );
    }

    if let Some(reason) = &summary.aborted {
        Err(CliError::domain(format!(
            "experiment aborted after {} ticks (partial log kept at {}): {reason}",
            summary.ticks,
            args.out.display()
        )))
    } else {
        Ok(())
    }
}
