//! CAN-FD payload codec for sample batches.
//!
//! The transport offers a 64-byte data field, which the layout below fills
//! exactly at 24 samples:
//!
//! ```text
//! offset  size  field
//!      0     4  seq of the first sample        (u32, little-endian)
//!      4     8  timestamp of the first sample  (u64 microseconds, LE)
//!     12     2  sample spacing                 (u16 microseconds, LE)
//!     14     1  sample count n                 (u8, <= 24)
//!     15     1  reserved, must encode as zero
//!     16   2*n  ADC counts                     (u16 each, LE)
//! ```
//!
//! Samples in one frame must be contiguous in sequence number and uniformly
//! spaced in time; the decoder reconstructs `seq0 + k` and `t0 + k*dt`.
//! Decoding is total: malformed bytes produce typed errors, never panics.

use alloc::vec::Vec;
use core::fmt;

/// Header length in bytes.
pub const HEADER_BYTES: usize = 16;
/// Most samples one frame can carry; fills the 64-byte CAN-FD data field.
pub const MAX_SAMPLES_PER_FRAME: usize = 24;
/// Largest encoded payload: `HEADER_BYTES + 2 * MAX_SAMPLES_PER_FRAME`.
pub const MAX_PAYLOAD_BYTES: usize = 64;

/// One acquired ADC sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensorSample {
    /// Monotone sample counter.
    pub seq: u32,
    /// Acquisition time in microseconds.
    pub timestamp_us: u64,
    /// Raw ADC code.
    pub counts: u16,
}

/// Decoded payload: samples plus the raw reserved byte.
///
/// A non-zero reserved byte is tolerated (forward compatibility) but flagged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub samples: Vec<SensorSample>,
    pub reserved: u8,
}

impl DecodedFrame {
    /// True when the reserved byte deviated from the zero the encoder writes.
    pub fn reserved_warning(&self) -> bool {
        self.reserved != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameError {
    /// More samples than one frame can carry.
    TooManySamples { n: usize },
    /// Sample timestamps are not uniformly spaced (or run backwards).
    NonUniformSpacing,
    /// Uniform spacing does not fit the u16 microsecond field.
    SpacingOverflow { dt_us: u64 },
    /// Sequence numbers are not consecutive.
    NonContiguousSeq,
    /// Fewer than [`HEADER_BYTES`] bytes.
    TruncatedHeader { len: usize },
    /// Header sample count exceeds [`MAX_SAMPLES_PER_FRAME`].
    BadSampleCount { n: u8 },
    /// Byte length disagrees with the header sample count.
    LengthMismatch { expected: usize, actual: usize },
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooManySamples { n } => {
                write!(f, "{n} samples exceed the {MAX_SAMPLES_PER_FRAME}-sample frame limit")
            }
            Self::NonUniformSpacing => {
                write!(f, "samples must be uniformly spaced in time")
            }
            Self::SpacingOverflow { dt_us } => {
                write!(f, "sample spacing {dt_us} us does not fit the 16-bit field")
            }
            Self::NonContiguousSeq => {
                write!(f, "sample sequence numbers must be consecutive")
            }
            Self::TruncatedHeader { len } => {
                write!(f, "truncated header: {len} bytes, need {HEADER_BYTES}")
            }
            Self::BadSampleCount { n } => {
                write!(f, "header sample count {n} exceeds {MAX_SAMPLES_PER_FRAME}")
            }
            Self::LengthMismatch { expected, actual } => {
                write!(f, "payload length {actual} does not match header ({expected} expected)")
            }
        }
    }
}

impl core::error::Error for FrameError {}

/// Encodes up to 24 contiguous, uniformly spaced samples.
///
/// An empty batch encodes a header-only 16-byte payload with zeroed
/// timestamp fields.
pub fn encode_frame(samples: &[SensorSample]) -> Result<Vec<u8>, FrameError> {
    let n = samples.len();
    if n > MAX_SAMPLES_PER_FRAME {
        return Err(FrameError::TooManySamples { n });
    }

    let (seq0, t0, dt) = match samples {
        [] => (0u32, 0u64, 0u16),
        [first] => (first.seq, first.timestamp_us, 0u16),
        [first, second, ..] => {
            let dt = second
                .timestamp_us
                .checked_sub(first.timestamp_us)
                .ok_or(FrameError::NonUniformSpacing)?;
            if dt > u64::from(u16::MAX) {
                return Err(FrameError::SpacingOverflow { dt_us: dt });
            }
            (first.seq, first.timestamp_us, dt as u16)
        }
    };
    for (k, sample) in samples.iter().enumerate() {
        if sample.seq != seq0.wrapping_add(k as u32) {
            return Err(FrameError::NonContiguousSeq);
        }
        let expected_t = t0.wrapping_add(k as u64 * u64::from(dt));
        if sample.timestamp_us != expected_t {
            return Err(FrameError::NonUniformSpacing);
        }
    }

    let mut out = Vec::with_capacity(HEADER_BYTES + 2 * n);
    out.extend_from_slice(&seq0.to_le_bytes());
    out.extend_from_slice(&t0.to_le_bytes());
    out.extend_from_slice(&dt.to_le_bytes());
    out.push(n as u8);
    out.push(0); // reserved
    for sample in samples {
        out.extend_from_slice(&sample.counts.to_le_bytes());
    }
    Ok(out)
}

/// Decodes a payload; exact inverse of [`encode_frame`] on valid input.
pub fn decode_frame(bytes: &[u8]) -> Result<DecodedFrame, FrameError> {
    if bytes.len() < HEADER_BYTES {
        return Err(FrameError::TruncatedHeader { len: bytes.len() });
    }
    let seq0 = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let t0 = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let dt = u16::from_le_bytes(bytes[12..14].try_into().unwrap());
    let n = bytes[14];
    let reserved = bytes[15];

    if usize::from(n) > MAX_SAMPLES_PER_FRAME {
        return Err(FrameError::BadSampleCount { n });
    }
    let expected = HEADER_BYTES + 2 * usize::from(n);
    if bytes.len() != expected {
        return Err(FrameError::LengthMismatch {
            expected,
            actual: bytes.len(),
        });
    }

    let mut samples = Vec::with_capacity(usize::from(n));
    for k in 0..usize::from(n) {
        let at = HEADER_BYTES + 2 * k;
        let counts = u16::from_le_bytes(bytes[at..at + 2].try_into().unwrap());
        samples.push(SensorSample {
            seq: seq0.wrapping_add(k as u32),
            timestamp_us: t0.wrapping_add(k as u64 * u64::from(dt)),
            counts,
        });
    }
    Ok(DecodedFrame { samples, reserved })
}
