//! Simulated acquisition: a force profile driven through the sensing chain
//! into timestamped ADC samples.

use alloc::vec::Vec;
use core::fmt;

use crate::adc::{self, AdcConfig};
use crate::frame::SensorSample;
use crate::math;
use crate::noise::NoiseModel;
use crate::optics::{OpticsError, SensingChain};

/// Acquisition rate ceiling in hertz.
pub const MAX_SAMPLE_RATE_HZ: f64 = 5000.0;

/// Deterministic force-vs-time profiles for simulated runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForceProfile {
    /// Constant hold.
    Constant { force_n: f64 },
    /// Linear ramp over `duration_s`, holding the end value afterwards.
    Ramp {
        start_n: f64,
        end_n: f64,
        duration_s: f64,
    },
    /// Periodic triangle 0 -> peak -> 0, one cycle per `period_s`.
    Triangle { peak_n: f64, period_s: f64 },
}

impl ForceProfile {
    /// Force in newtons at time `t` seconds.
    pub fn force_at(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { force_n } => force_n,
            Self::Ramp {
                start_n,
                end_n,
                duration_s,
            } => {
                if t >= duration_s {
                    end_n
                } else {
                    start_n + (end_n - start_n) * (t / duration_s)
                }
            }
            Self::Triangle { peak_n, period_s } => {
                let phase = math::rem_euclid(t / period_s, 1.0);
                peak_n * (1.0 - (2.0 * phase - 1.0).abs())
            }
        }
    }

    fn validate(&self) -> Result<(), StreamError> {
        let bad = |what: &'static str, value: f64| StreamError::InvalidProfile { what, value };
        match *self {
            Self::Constant { force_n } => {
                if !(force_n.is_finite() && force_n >= 0.0) {
                    return Err(bad("constant force", force_n));
                }
            }
            Self::Ramp {
                start_n,
                end_n,
                duration_s,
            } => {
                if !(start_n.is_finite() && start_n >= 0.0) {
                    return Err(bad("ramp start", start_n));
                }
                if !(end_n.is_finite() && end_n >= 0.0) {
                    return Err(bad("ramp end", end_n));
                }
                if !(duration_s.is_finite() && duration_s > 0.0) {
                    return Err(bad("ramp duration", duration_s));
                }
            }
            Self::Triangle { peak_n, period_s } => {
                if !(peak_n.is_finite() && peak_n >= 0.0) {
                    return Err(bad("triangle peak", peak_n));
                }
                if !(period_s.is_finite() && period_s > 0.0) {
                    return Err(bad("triangle period", period_s));
                }
            }
        }
        Ok(())
    }
}

/// Acquisition run parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamConfig {
    /// Sample rate in hertz, at most [`MAX_SAMPLE_RATE_HZ`].
    pub rate_hz: f64,
    /// Run length in seconds.
    pub duration_s: f64,
    /// Ambient temperature in degC.
    pub temperature_c: f64,
    pub adc: AdcConfig,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            rate_hz: 1000.0,
            duration_s: 10.0,
            temperature_c: 25.0,
            adc: AdcConfig::default(),
        }
    }
}

/// A simulated acquisition log.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub adc: AdcConfig,
    /// Requested rate; timestamps use the microsecond-rounded period.
    pub rate_hz: f64,
    /// Sample spacing in microseconds.
    pub dt_us: u64,
    pub samples: Vec<SensorSample>,
}

impl SampleStream {
    /// Acquisition time of sample `k` in seconds.
    pub fn time_s(&self, k: usize) -> f64 {
        (k as u64 * self.dt_us) as f64 * 1e-6
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StreamError {
    /// Requested rate exceeds the acquisition ceiling.
    RateLimit { requested_hz: f64, max_hz: f64 },
    InvalidRate { requested_hz: f64 },
    InvalidDuration { duration_s: f64 },
    /// Samples store 16-bit codes; wider ADC configs cannot stream.
    SampleWidth { bits: u32 },
    InvalidProfile { what: &'static str, value: f64 },
    Optics(OpticsError),
}

impl fmt::Display for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RateLimit {
                requested_hz,
                max_hz,
            } => write!(
                f,
                "sample rate {requested_hz} Hz exceeds the {max_hz} Hz acquisition limit"
            ),
            Self::InvalidRate { requested_hz } => {
                write!(f, "sample rate must be positive, got {requested_hz} Hz")
            }
            Self::InvalidDuration { duration_s } => {
                write!(f, "duration must be finite and non-negative, got {duration_s} s")
            }
            Self::SampleWidth { bits } => {
                write!(f, "{bits}-bit ADC codes do not fit 16-bit stream samples")
            }
            Self::InvalidProfile { what, value } => {
                write!(f, "invalid profile parameter: {what} = {value}")
            }
            Self::Optics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StreamError {}

impl From<OpticsError> for StreamError {
    fn from(e: OpticsError) -> Self {
        Self::Optics(e)
    }
}

/// Runs the profile through optics, temperature, noise, and the ADC.
///
/// Produces `ceil(rate * duration)` samples with exactly uniform microsecond
/// timestamps (the period is rounded to whole microseconds so batches stay
/// frame-encodable). Deterministic for a given noise seed.
pub fn stream_simulate(
    profile: &ForceProfile,
    config: &StreamConfig,
    chain: &SensingChain,
    noise: &NoiseModel,
) -> Result<SampleStream, StreamError> {
    profile.validate()?;
    if !(config.rate_hz.is_finite() && config.rate_hz > 0.0) {
        return Err(StreamError::InvalidRate {
            requested_hz: config.rate_hz,
        });
    }
    if config.rate_hz > MAX_SAMPLE_RATE_HZ {
        return Err(StreamError::RateLimit {
            requested_hz: config.rate_hz,
            max_hz: MAX_SAMPLE_RATE_HZ,
        });
    }
    if !(config.duration_s.is_finite() && config.duration_s >= 0.0) {
        return Err(StreamError::InvalidDuration {
            duration_s: config.duration_s,
        });
    }
    if config.adc.bits > 16 {
        return Err(StreamError::SampleWidth {
            bits: config.adc.bits,
        });
    }

    let exact = config.rate_hz * config.duration_s;
    // ceil with a one-part-in-1e9 slack so 100 Hz * 0.1 s stays 10 samples.
    let n = if exact <= 0.0 {
        0
    } else {
        math::ceil(exact - 1e-9 * exact.max(1.0)) as usize
    };
    let dt_us = (1e6 / config.rate_hz + 0.5) as u64;

    let mut stream = noise.stream();
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let timestamp_us = k as u64 * dt_us;
        let t = timestamp_us as f64 * 1e-6;
        let force = profile.force_at(t);
        let volts = chain.sensor_voltage(force, config.temperature_c, &mut stream)?;
        samples.push(SensorSample {
            seq: k as u32,
            timestamp_us,
            counts: quantize16(volts, &config.adc),
        });
    }
    Ok(SampleStream {
        adc: config.adc,
        rate_hz: config.rate_hz,
        dt_us,
        samples,
    })
}

fn quantize16(volts: f64, adc: &AdcConfig) -> u16 {
    // bits <= 16 is checked before streaming starts.
    adc::quantize(volts, adc) as u16
}
