//! Shared helpers for the integration suites: an independent transcription of
//! the deflection formulas (the oracle) and a calibrated-chain builder.
//!
//! Each test target compiles this module separately and uses a different
//! subset of it.
#![allow(dead_code)]

use optotension_core::adc::{counts_to_voltage, AdcConfig};
use optotension_core::calib::{fit_poly, CalibrationPoly};
use optotension_core::noise::NoiseModel;
use optotension_core::optics::SensingChain;
use optotension_core::stream::{stream_simulate, ForceProfile, SampleStream, StreamConfig};

/// Drawing dimensions and material constants used by the oracle, all SI.
#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub e: f64,
    pub g: f64,
    pub ks: f64,
}

impl OracleParams {
    /// Reference drawing values with the handbook AL7075-T6 constants.
    pub fn reference(a2: f64) -> Self {
        Self {
            l1: 2.0e-3,
            l2: 1.5e-3,
            l3: 1.4e-3,
            l4: 1.6e-3,
            t1: 2.0e-3,
            t2: 1.9e-3,
            t3: 2.5e-3,
            a1: 2.55e-3,
            a2,
            b1: 3.0e-3,
            e: 71.7e9,
            g: 26.9e9,
            ks: 5.0 / 6.0,
        }
    }
}

/// Direct, self-contained transcription of the half-model deflection sum.
///
/// Deliberately independent of the library implementation: areas, section
/// properties, and all six terms are written out inline so the two routes can
/// be compared to 1e-12 relative.
pub fn oracle_half_dx(force: f64, p: &OracleParams) -> f64 {
    let area1 = p.b1 * p.t1;
    let area2 = p.b1 * (p.t1 + p.t3);
    let area3 = p.b1 * p.t2;
    let area4 = p.b1 * (p.t1 / 2.0 + p.t3);

    let d1 = force * p.l1 / (p.e * area1);
    let d2 = force * p.l2 / (p.e * area2);
    let d3 = force * p.l3 / (p.e * area3);
    let d4 = force * p.l4 / (p.e * area4);

    let i1 = p.b1 * p.t1 * p.t1 * p.t1 / 12.0;
    let i2 = p.b1 * p.t2 * p.t2 * p.t2 / 12.0;
    let a5 = p.b1 * p.t1;
    let a6 = p.b1 * p.t2;

    let c1 = p.a1 / (p.e * i1) + 1.0 / (p.ks * p.g * a5);
    let c2 = p.a2 / (p.e * i2) + 1.0 / (p.ks * p.g * a6);
    let d5 = force * p.a1 * p.a1 * c1;
    let d6 = (force * p.a2 * (p.a2 * c2 - p.a1 * c1)).max(0.0);

    d1 + d2 + d3 + d4 + d5 + d6
}

/// A fully calibrated measurement chain plus the sweep it was fitted on.
pub struct CalibratedSetup {
    pub chain: SensingChain,
    pub adc: AdcConfig,
    pub noise: NoiseModel,
    pub poly: CalibrationPoly,
    pub sweep: SampleStream,
    pub profile: ForceProfile,
}

/// Runs the 0 -> 70 -> 0 N triangle sweep through the full chain at the
/// default (paper-matched) noise level and fits the cubic against the true
/// profile forces.
pub fn calibrated_setup(seed: u64) -> CalibratedSetup {
    let chain = SensingChain::reference();
    let adc = AdcConfig::default();
    let noise = NoiseModel {
        seed,
        ..NoiseModel::default()
    };
    let profile = ForceProfile::Triangle {
        peak_n: 70.0,
        period_s: 40.0,
    };
    let config = StreamConfig {
        rate_hz: 1000.0,
        duration_s: 40.0,
        temperature_c: 25.0,
        adc,
    };
    let sweep = stream_simulate(&profile, &config, &chain, &noise).expect("sweep simulation");
    let pairs: Vec<(f64, f64)> = sweep
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let volts = counts_to_voltage(u32::from(s.counts), &adc).expect("valid counts");
            (volts, profile.force_at(sweep.time_s(k)))
        })
        .collect();
    let poly = fit_poly(&pairs, 3).expect("cubic fit");
    CalibratedSetup {
        chain,
        adc,
        noise,
        poly,
        sweep,
        profile,
    }
}

/// Uniform f64 in [0, hi) from a raw 64-bit draw.
pub fn uniform(bits: u64, hi: f64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * hi
}
