//! Photo-reflector response model: gap to analog voltage.
//!
//! The reflector outputs a voltage that rises steeply as the reflective
//! surface approaches, peaks, and decays in the far field. The sensing branch
//! here is the near-field window (0.2-0.5 mm for the reference part), chosen
//! entirely on one side of the peak so that force-to-voltage stays monotone.
//!
//! Response curve:
//!
//! ```text
//! v(d) = v_peak * (d/d_peak)^2 * exp(2*(1 - d/d_peak))
//! ```
//!
//! which is zero at contact, unimodal, and reaches exactly `v_peak` at
//! `d_peak`. Temperature enters as a linear offset on the output voltage
//! (infrared dark-current drift).

use core::fmt;

use crate::elastomer::{
    self, ElastomerGeometry, ElastomerError, Material, SectionProperties,
};
use crate::noise::NoiseStream;

/// Parametric response and placement of the photo-reflector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotoReflectorModel {
    /// Peak output voltage (V).
    pub v_peak: f64,
    /// Gap at which the output peaks (m).
    pub d_peak: f64,
    /// Rest gap with no load applied (m).
    pub rest_gap: f64,
    /// Lower edge of the operating window (m).
    pub window_min: f64,
    /// Upper edge of the operating window (m).
    pub window_max: f64,
    /// +1 if tension widens the gap, -1 if tension narrows it.
    pub gap_sign: f64,
    /// Temperature drift coefficient (V/degC).
    pub temp_coeff: f64,
    /// Reference temperature at which no drift applies (degC).
    pub t_ref: f64,
}

impl PhotoReflectorModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v_peak: f64,
        d_peak: f64,
        rest_gap: f64,
        window_min: f64,
        window_max: f64,
        gap_sign: f64,
        temp_coeff: f64,
        t_ref: f64,
    ) -> Result<Self, OpticsError> {
        if !(v_peak.is_finite() && v_peak > 0.0) {
            return Err(OpticsError::InvalidModel {
                field: "v_peak",
                value: v_peak,
            });
        }
        if !(window_min.is_finite() && window_min > 0.0 && window_max > window_min) {
            return Err(OpticsError::InvalidModel {
                field: "window",
                value: window_min,
            });
        }
        if !(rest_gap >= window_min && rest_gap <= window_max) {
            return Err(OpticsError::InvalidModel {
                field: "rest_gap",
                value: rest_gap,
            });
        }
        // The whole window must sit on the rising branch.
        if !(d_peak.is_finite() && d_peak > window_max) {
            return Err(OpticsError::InvalidModel {
                field: "d_peak",
                value: d_peak,
            });
        }
        if gap_sign != 1.0 && gap_sign != -1.0 {
            return Err(OpticsError::InvalidModel {
                field: "gap_sign",
                value: gap_sign,
            });
        }
        if !temp_coeff.is_finite() || !t_ref.is_finite() {
            return Err(OpticsError::InvalidModel {
                field: "temp_coeff",
                value: temp_coeff,
            });
        }
        Ok(Self {
            v_peak,
            d_peak,
            rest_gap,
            window_min,
            window_max,
            gap_sign,
            temp_coeff,
            t_ref,
        })
    }

    /// Defaults for the reference sensor: 3.0 V peak at 0.55 mm, 0.4 mm rest
    /// gap, 0.2-0.5 mm window, tension narrows the gap.
    ///
    /// The drift coefficient 4.375 mV/degC spans 0.35 V over -20..60 degC,
    /// the dark-current drift reported for this class of infrared part.
    pub fn reference() -> Self {
        Self {
            v_peak: 3.0,
            d_peak: 0.55e-3,
            rest_gap: 0.4e-3,
            window_min: 0.2e-3,
            window_max: 0.5e-3,
            gap_sign: -1.0,
            temp_coeff: 0.35 / 80.0,
            t_ref: 25.0,
        }
    }
}

/// Errors from the optical model.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticsError {
    /// Gap distances cannot be negative.
    NegativeGap { value: f64 },
    /// The deflected gap left the operating window.
    GapOutOfWindow {
        force_n: f64,
        gap_m: f64,
        window_min: f64,
        window_max: f64,
    },
    InvalidModel { field: &'static str, value: f64 },
    Elastomer(ElastomerError),
}

impl fmt::Display for OpticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeGap { value } => {
                write!(f, "gap distance must be non-negative, got {value} m")
            }
            Self::GapOutOfWindow {
                force_n,
                gap_m,
                window_min,
                window_max,
            } => write!(
                f,
                "force {force_n} N drives the gap to {gap_m} m, outside the operating window [{window_min}, {window_max}] m"
            ),
            Self::InvalidModel { field, value } => {
                write!(f, "reflector model field {field} is out of range: {value}")
            }
            Self::Elastomer(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OpticsError {}

impl From<ElastomerError> for OpticsError {
    fn from(e: ElastomerError) -> Self {
        Self::Elastomer(e)
    }
}

/// Reflector output voltage at gap `d` (meters).
pub fn response_voltage(d: f64, model: &PhotoReflectorModel) -> Result<f64, OpticsError> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(OpticsError::NegativeGap { value: d });
    }
    let r = d / model.d_peak;
    Ok(model.v_peak * r * r * crate::math::exp(2.0 * (1.0 - r)))
}

/// Mechanics plus section data bundled for the optical chain.
#[derive(Debug, Clone, Copy)]
pub struct SensingChain {
    pub geometry: ElastomerGeometry,
    pub section: SectionProperties,
    pub material: Material,
    pub reflector: PhotoReflectorModel,
}

impl SensingChain {
    /// Reference sensor end to end: reference geometry, rectangular sections,
    /// AL7075-T6, reference reflector placement.
    pub fn reference() -> Self {
        let geometry = ElastomerGeometry::reference();
        Self {
            geometry,
            section: SectionProperties::rectangular(&geometry),
            material: Material::al7075_t6(),
            reflector: PhotoReflectorModel::reference(),
        }
    }

    /// Gap under tension: `rest_gap + gap_sign * total_dx(F)`.
    ///
    /// Errs when the deflected gap leaves the operating window, naming the
    /// offending force.
    pub fn gap_from_force(&self, force_n: f64) -> Result<f64, OpticsError> {
        let breakdown = elastomer::total_displacement(
            force_n,
            &self.geometry,
            &self.section,
            &self.material,
        )?;
        let gap = self.reflector.rest_gap + self.reflector.gap_sign * breakdown.total_dx;
        if gap < self.reflector.window_min || gap > self.reflector.window_max {
            return Err(OpticsError::GapOutOfWindow {
                force_n,
                gap_m: gap,
                window_min: self.reflector.window_min,
                window_max: self.reflector.window_max,
            });
        }
        Ok(gap)
    }

    /// Noise-free analog voltage at tension `force_n` and temperature `t_c`.
    pub fn voltage_at(&self, force_n: f64, t_c: f64) -> Result<f64, OpticsError> {
        let gap = self.gap_from_force(force_n)?;
        let v = response_voltage(gap, &self.reflector)?;
        Ok(apply_temperature(v, t_c, &self.reflector))
    }

    /// Full analog chain with a noise draw appended.
    ///
    /// Deterministic for a given stream state; pass a stream opened from a
    /// seeded [`crate::NoiseModel`] for reproducible series.
    pub fn sensor_voltage(
        &self,
        force_n: f64,
        t_c: f64,
        noise: &mut NoiseStream,
    ) -> Result<f64, OpticsError> {
        Ok(self.voltage_at(force_n, t_c)? + noise.draw())
    }
}

/// Shifts a voltage by the linear temperature drift `alpha*(T - t_ref)`.
pub fn apply_temperature(v: f64, t_c: f64, model: &PhotoReflectorModel) -> f64 {
    v + model.temp_coeff * (t_c - model.t_ref)
}
