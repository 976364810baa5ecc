//! `sweep`: tabulate deflection and stiffness over geometry grids.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use optotension_core::elastomer::{sweep_geometry, AllowableCheck, GeometryParam, SweepAxis};

use crate::config::{render_header, ModelConfig};
use crate::logio::{self, SWEEP_HEADER};
use crate::CliError;

#[derive(Args)]
pub struct SweepArgs {
    /// Axis spec `name=start:stop:step` with optional mm/um suffixes,
    /// e.g. `b1=2mm:4mm:0.5mm`. Repeat for a cartesian grid.
    #[arg(long = "param", value_name = "SPEC", required = true)]
    pub params: Vec<String>,

    /// Tension applied at every grid point, in newtons.
    #[arg(long, default_value_t = 200.0)]
    pub force: f64,

    /// Sweep table destination.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
}

fn parse_param(spec: &str) -> Result<SweepAxis, CliError> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("sweep axis `{spec}`: expected name=start:stop:step")))?;
    let param = match name.trim() {
        "l1" => GeometryParam::L1,
        "l2" => GeometryParam::L2,
        "l3" => GeometryParam::L3,
        "l4" => GeometryParam::L4,
        "t1" => GeometryParam::T1,
        "t2" => GeometryParam::T2,
        "t3" => GeometryParam::T3,
        "a1" => GeometryParam::A1,
        "a2" => GeometryParam::A2,
        "b1" => GeometryParam::B1,
        other => {
            return Err(CliError::usage(format!(
                "unknown sweep parameter `{other}` (expected l1..l4, t1..t3, a1, a2, b1)"
            )))
        }
    };
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::usage(format!(
            "sweep axis `{spec}`: expected start:stop:step"
        )));
    };
    let start = super::parse_length_m(start)?;
    let stop = super::parse_length_m(stop)?;
    let step = super::parse_length_m(step)?;
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::usage(format!("sweep axis `{spec}`: step must be positive")));
    }
    if stop < start {
        return Err(CliError::usage(format!(
            "sweep axis `{spec}`: stop must not be below start"
        )));
    }
    // Inclusive range with a tolerance for the last grid point.
    let count = ((stop - start) / step + 1e-9) as usize + 1;
    let values = (0..count).map(|k| start + step * k as f64).collect();
    Ok(SweepAxis { param, values })
}

pub fn run(model: &ModelConfig, seed: u64, args: SweepArgs) -> Result<(), CliError> {
    let axes: Vec<SweepAxis> = args
        .params
        .iter()
        .map(|s| parse_param(s))
        .collect::<Result<_, _>>()?;

    let outcome = sweep_geometry(&model.geometry, &axes, &model.material, args.force)
        .map_err(CliError::domain_display)?;

    let mut run_entries = super::base_run_entries("sweep", seed);
    run_entries.push(("force_n".to_string(), args.force.to_string()));
    for (i, spec) in args.params.iter().enumerate() {
        run_entries.push((format!("param{i}"), spec.clone()));
    }

    let mut text = render_header(model, &run_entries);
    text.push_str(SWEEP_HEADER);
    text.push('\n');
    for record in &outcome.records {
        let settings: Vec<String> = record
            .settings
            .iter()
            .map(|(p, v)| format!("{}={v}", p.name()))
            .collect();
        let allowable = match record.allowable {
            AllowableCheck::WithinLimit => "within_limit",
            AllowableCheck::Overload => "overload",
        };
        let _ = writeln!(
            text,
            "{},{},{},{}",
            settings.join(";"),
            record.half_dx_m,
            record.stiffness_n_per_m,
            allowable
        );
    }
    logio::write_text(&args.out, &text)?;

    for skip in &outcome.skipped {
        let settings: Vec<String> = skip
            .settings
            .iter()
            .map(|(p, v)| format!("{}={v}", p.name()))
            .collect();
        eprintln!("skipped {}: {}", settings.join(";"), skip.reason);
    }
    eprintln!(
        "wrote {} sweep records ({} skipped) to {}",
        outcome.records.len(),
        outcome.skipped.len(),
        args.out.display()
    );
    Ok(())
}
