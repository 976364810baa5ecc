//! Seeded Gaussian voltage noise for the sensing chain.

use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

/// Default noise standard deviation on the analog output, in volts.
///
/// Tuned so that the decoded force-domain standard deviation of a stationary
/// mid-range acquisition equals the sensor's 9.888 mN resolution once ADC
/// quantization is included.
pub const DEFAULT_SIGMA_V: f64 = 1.775e-5;

/// Zero-mean Gaussian noise description: standard deviation plus RNG seed.
///
/// Identical seeds reproduce identical draw sequences bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Voltage standard deviation (V); zero disables noise.
    pub sigma_v: f64,
    /// Stream seed.
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma_v: f64, seed: u64) -> Result<Self, NoiseError> {
        if !(sigma_v.is_finite() && sigma_v >= 0.0) {
            return Err(NoiseError::InvalidSigma { value: sigma_v });
        }
        Ok(Self { sigma_v, seed })
    }

    /// Noise-free model; [`NoiseStream::draw`] always returns zero.
    pub fn disabled() -> Self {
        Self {
            sigma_v: 0.0,
            seed: 0,
        }
    }

    /// Opens the draw stream. Each call restarts from the seed.
    pub fn stream(&self) -> NoiseStream {
        NoiseStream {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            sigma_v: self.sigma_v,
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            sigma_v: DEFAULT_SIGMA_V,
            seed: 0,
        }
    }
}

/// Stateful draw sequence owned by a single producer.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    sigma_v: f64,
}

impl NoiseStream {
    /// Next noise sample in volts.
    pub fn draw(&mut self) -> f64 {
        if self.sigma_v == 0.0 {
            return 0.0;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sigma_v * z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseError {
    InvalidSigma { value: f64 },
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSigma { value } => {
                write!(f, "noise sigma must be finite and non-negative, got {value}")
            }
        }
    }
}

impl core::error::Error for NoiseError {}
