//! ADC quantization: analog volts to counts and back.

use core::fmt;

use crate::math;

/// Converter resolution and reference, 16-bit / 3.3 V by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcConfig {
    /// Resolution in bits, 8 to 24.
    pub bits: u32,
    /// Reference (full-scale) voltage in volts.
    pub v_ref: f64,
}

impl AdcConfig {
    pub fn new(bits: u32, v_ref: f64) -> Result<Self, AdcError> {
        if !(8..=24).contains(&bits) {
            return Err(AdcError::InvalidBits { bits });
        }
        if !(v_ref.is_finite() && v_ref > 0.0) {
            return Err(AdcError::InvalidReference { v_ref });
        }
        Ok(Self { bits, v_ref })
    }

    /// Largest representable code, `2^bits - 1`.
    pub fn full_scale_counts(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    /// One least-significant bit in volts (50.35 uV for the default).
    pub fn lsb(&self) -> f64 {
        self.v_ref / f64::from(self.full_scale_counts())
    }
}

impl Default for AdcConfig {
    /// The acquisition front end: 16-bit ADC on the 3.3 V analog rail.
    fn default() -> Self {
        Self {
            bits: 16,
            v_ref: 3.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdcError {
    InvalidBits { bits: u32 },
    InvalidReference { v_ref: f64 },
    /// Code exceeds `2^bits - 1`.
    CountsOverflow { counts: u32, max: u32 },
}

impl fmt::Display for AdcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidBits { bits } => {
                write!(f, "ADC resolution must be 8..=24 bits, got {bits}")
            }
            Self::InvalidReference { v_ref } => {
                write!(f, "ADC reference must be finite and positive, got {v_ref}")
            }
            Self::CountsOverflow { counts, max } => {
                write!(f, "counts {counts} exceed the {max} full-scale code")
            }
        }
    }
}

impl core::error::Error for AdcError {}

/// Quantizes a voltage: `floor(clamp(v, 0, v_ref)/v_ref * (2^bits - 1))`.
///
/// Out-of-range inputs clamp to the rails; NaN clamps to zero.
pub fn quantize(v: f64, adc: &AdcConfig) -> u32 {
    let clamped = if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, adc.v_ref)
    };
    let max = adc.full_scale_counts();
    let code = math::floor(clamped / adc.v_ref * f64::from(max));
    // floor() keeps the value <= max already; the cast guard is for rounding
    // at the top rail.
    if code >= f64::from(max) {
        max
    } else {
        code as u32
    }
}

/// Reconstructs the voltage midpoint-free: `counts/(2^bits - 1) * v_ref`.
///
/// The quantize/reconstruct round trip errs by at most one LSB.
pub fn counts_to_voltage(counts: u32, adc: &AdcConfig) -> Result<f64, AdcError> {
    let max = adc.full_scale_counts();
    if counts > max {
        return Err(AdcError::CountsOverflow { counts, max });
    }
    Ok(f64::from(counts) / f64::from(max) * adc.v_ref)
}
