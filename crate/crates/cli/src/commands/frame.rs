//! `frame`: hex encode/decode of CAN-FD sample payloads.

use std::io::Read;

use clap::{Args, Subcommand};

use optotension_core::frame::{
    decode_frame, encode_frame, SensorSample, MAX_SAMPLES_PER_FRAME,
};

use crate::CliError;

#[derive(Args)]
pub struct FrameArgs {
    #[command(subcommand)]
    pub action: FrameAction,
}

#[derive(Subcommand)]
pub enum FrameAction {
    /// Encode counts into hex payloads, one frame per line.
    Encode {
        /// Comma-separated ADC counts.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<u16>,

        /// Sequence number of the first sample.
        #[arg(long, default_value_t = 0)]
        seq: u32,

        /// Timestamp of the first sample in microseconds.
        #[arg(long = "t0-us", default_value_t = 0)]
        t0_us: u64,

        /// Sample spacing in microseconds.
        #[arg(long = "dt-us", default_value_t = 1000)]
        dt_us: u16,

        /// Samples per frame (up to 24).
        #[arg(long, default_value_t = MAX_SAMPLES_PER_FRAME)]
        batch: usize,
    },
    /// Decode hex payloads (arguments, or stdin when none) into a sample
    /// listing.
    Decode {
        /// Hex payload strings.
        payloads: Vec<String>,
    },
}

pub fn run(args: FrameArgs) -> Result<(), CliError> {
    match args.action {
        FrameAction::Encode {
            counts,
            seq,
            t0_us,
            dt_us,
            batch,
        } => {
            if batch == 0 || batch > MAX_SAMPLES_PER_FRAME {
                return Err(CliError::usage(format!(
                    "batch must be 1..={MAX_SAMPLES_PER_FRAME}, got {batch}"
                )));
            }
            let samples: Vec<SensorSample> = counts
                .iter()
                .enumerate()
                .map(|(k, &c)| SensorSample {
                    seq: seq.wrapping_add(k as u32),
                    timestamp_us: t0_us + k as u64 * u64::from(dt_us),
                    counts: c,
                })
                .collect();
            for chunk in samples.chunks(batch) {
                let bytes = encode_frame(chunk).map_err(CliError::domain_display)?;
                println!("{}", to_hex(&bytes));
            }
            Ok(())
        }
        FrameAction::Decode { payloads } => {
            let payloads = if payloads.is_empty() {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| CliError::usage(format!("cannot read stdin: {e}")))?;
                buf.split_whitespace().map(str::to_string).collect()
            } else {
                payloads
            };
            if payloads.is_empty() {
                return Err(CliError::usage("no payloads to decode"));
            }
            let mut samples = Vec::new();
            for payload in &payloads {
                let bytes = from_hex(payload)?;
                let decoded = decode_frame(&bytes).map_err(CliError::domain_display)?;
                if decoded.reserved_warning() {
                    eprintln!(
                        "warning: reserved byte is 0x{:02x}, expected zero",
                        decoded.reserved
                    );
                }
                samples.extend(decoded.samples);
            }
            println!("seq,timestamp_us,counts");
            for s in &samples {
                println!("{},{},{}", s.seq, s.timestamp_us, s.counts);
            }
            Ok(())
        }
    }
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn from_hex(text: &str) -> Result<Vec<u8>, CliError> {
    let text = text.trim();
    if !text.len().is_multiple_of(2) {
        return Err(CliError::domain(format!(
            "hex payload has odd length {}",
            text.len()
        )));
    }
    (0..text.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&text[i..i + 2], 16)
                .map_err(|_| CliError::domain(format!("malformed hex near `{}`", &text[i..i + 2])))
        })
        .collect()
}
