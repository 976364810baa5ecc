//! Analytic deflection model of the sensor's symmetric spring element.
//!
//! The spring element is a machined aluminium part, laterally symmetric, with
//! the left eyelet pinned and string tension applied at the right eyelet. For
//! analysis one half of the structure is modelled as a chain of four axial
//! segments plus two lever arms that deflect in bending and shear (Timoshenko
//! beam theory, so shear compliance is kept alongside bending).
//!
//! Elongation of one half under tension `F`:
//!
//! ```text
//! d_i = F*l_i / (E*A_i)                       i = 1..4   (axial segments)
//! d5  = F*a1^2 * ( a1/(E*I1) + 1/(ks*G*A5) )             (first lever arm)
//! d6  = F*a2 * [ a2*( a2/(E*I2) + 1/(ks*G*A6) )
//!              - a1*( a1/(E*I1) + 1/(ks*G*A5) ) ]        (second lever arm)
//! ```
//!
//! and the gap change seen by the photo-reflector doubles the half-model sum
//! by symmetry: `total_dx = 2*(d1+..+d6)`.
//!
//! Cross-sections are rectangles of depth `b1`:
//! `A1 = b1*t1`, `A2 = b1*(t1+t3)`, `A3 = b1*t2`, `A4 = b1*(t1/2+t3)`.

use alloc::vec::Vec;
use core::fmt;

/// FEM-verified maximum load of the reference elastomer, in newtons.
///
/// Loads up to and including this value are within the structural limit.
pub const ALLOWABLE_FORCE_N: f64 = 207.26;

/// Elastic constants of the spring-element material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Elastic modulus E (Pa).
    pub elastic_modulus: f64,
    /// Shear modulus G (Pa).
    pub shear_modulus: f64,
    /// Shear correction factor k_s (5/6 for rectangular sections).
    pub shear_coefficient: f64,
}

impl Material {
    pub fn new(
        elastic_modulus: f64,
        shear_modulus: f64,
        shear_coefficient: f64,
    ) -> Result<Self, ElastomerError> {
        let check = |field: &'static str, value: f64, ok: bool| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(ElastomerError::InvalidMaterial { field, value })
            }
        };
        check("elastic_modulus", elastic_modulus, elastic_modulus > 0.0)?;
        check("shear_modulus", shear_modulus, shear_modulus > 0.0)?;
        check(
            "shear_coefficient",
            shear_coefficient,
            shear_coefficient > 0.0 && shear_coefficient <= 1.0,
        )?;
        Ok(Self {
            elastic_modulus,
            shear_modulus,
            shear_coefficient,
        })
    }

    /// AL7075-T6: E = 71.7 GPa, G = 26.9 GPa, k_s = 5/6.
    ///
    /// The handbook elastic modulus is used; a shear modulus larger than the
    /// elastic modulus would be unphysical for this alloy.
    pub fn al7075_t6() -> Self {
        Self {
            elastic_modulus: 71.7e9,
            shear_modulus: 26.9e9,
            shear_coefficient: 5.0 / 6.0,
        }
    }
}

/// Dimensions of one half of the symmetric spring element, in meters.
///
/// `l1..l4` are axial segment lengths, `t1..t3` section thicknesses, `a1` and
/// `a2` the lever arms of the two bending/shear members, and `b1` the
/// out-of-plane depth shared by all sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElastomerGeometry {
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
}

impl ElastomerGeometry {
    /// Builds a geometry from the drawing dimensions.
    ///
    /// The second lever arm `a2` is not a drawing dimension; it defaults to
    /// `a1 + (t1 + t2)/2` (mid-thickness offset between the two members) and
    /// can be overridden with [`with_second_lever_arm`].
    ///
    /// [`with_second_lever_arm`]: ElastomerGeometry::with_second_lever_arm
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l1: f64,
        l2: f64,
        l3: f64,
        l4: f64,
        t1: f64,
        t2: f64,
        t3: f64,
        a1: f64,
        b1: f64,
    ) -> Result<Self, ElastomerError> {
        let a2 = a1 + (t1 + t2) / 2.0;
        Self::with_all(l1, l2, l3, l4, t1, t2, t3, a1, a2, b1)
    }

    /// Replaces the second lever arm `a2`.
    pub fn with_second_lever_arm(mut self, a2: f64) -> Result<Self, ElastomerError> {
        if !(a2.is_finite() && a2 > 0.0) {
            return Err(ElastomerError::InvalidGeometry {
                field: "a2",
                value: a2,
            });
        }
        self.a2 = a2;
        Ok(self)
    }

    #[allow(clippy::too_many_arguments)]
    fn with_all(
        l1: f64,
        l2: f64,
        l3: f64,
        l4: f64,
        t1: f64,
        t2: f64,
        t3: f64,
        a1: f64,
        a2: f64,
        b1: f64,
    ) -> Result<Self, ElastomerError> {
        let geom = Self {
            l1,
            l2,
            l3,
            l4,
            t1,
            t2,
            t3,
            a1,
            a2,
            b1,
        };
        geom.validate()?;
        Ok(geom)
    }

    fn validate(&self) -> Result<(), ElastomerError> {
        for (field, value) in self.fields() {
            if !(value.is_finite() && value > 0.0) {
                return Err(ElastomerError::InvalidGeometry { field, value });
            }
        }
        Ok(())
    }

    fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("l1", self.l1),
            ("l2", self.l2),
            ("l3", self.l3),
            ("l4", self.l4),
            ("t1", self.t1),
            ("t2", self.t2),
            ("t3", self.t3),
            ("a1", self.a1),
            ("a2", self.a2),
            ("b1", self.b1),
        ]
    }

    /// Dimensions of the fabricated reference sensor (13 mm x 7 mm x 6.5 mm
    /// envelope): l = 2 / 1.5 / 1.4 / 1.6 mm, t = 2 / 1.9 / 2.5 mm,
    /// a1 = 2.55 mm, b1 = 3 mm.
    ///
    /// `a2` is set to 3.144 mm, the value that makes the analytic half-model
    /// reproduce the published 0.04753 mm elongation at 200 N; see the
    /// acceptance suite for the calibration search.
    pub fn reference() -> Self {
        Self {
            l1: 2.0e-3,
            l2: 1.5e-3,
            l3: 1.4e-3,
            l4: 1.6e-3,
            t1: 2.0e-3,
            t2: 1.9e-3,
            t3: 2.5e-3,
            a1: 2.55e-3,
            a2: 3.144e-3,
            b1: 3.0e-3,
        }
    }

    /// Cross-sectional areas of the four axial segments (m^2).
    pub fn axial_areas(&self) -> [f64; 4] {
        [
            self.b1 * self.t1,
            self.b1 * (self.t1 + self.t3),
            self.b1 * self.t2,
            self.b1 * (self.t1 / 2.0 + self.t3),
        ]
    }
}

/// Bending and shear section properties of the two lever members.
///
/// The default derivation assumes rectangular sections: `I = b1*t^3/12`,
/// shear areas `A5 = b1*t1` and `A6 = b1*t2`. Overrides are accepted through
/// [`SectionProperties::new`] for non-rectangular or notched members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProperties {
    /// Second moment of area of the first lever member (m^4).
    pub i1: f64,
    /// Second moment of area of the second lever member (m^4).
    pub i2: f64,
    /// Shear area of the first lever member (m^2).
    pub a5: f64,
    /// Shear area of the second lever member (m^2).
    pub a6: f64,
}

impl SectionProperties {
    pub fn new(i1: f64, i2: f64, a5: f64, a6: f64) -> Result<Self, ElastomerError> {
        for (field, value) in [("i1", i1), ("i2", i2), ("a5", a5), ("a6", a6)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ElastomerError::InvalidSection { field, value });
            }
        }
        Ok(Self { i1, i2, a5, a6 })
    }

    /// Rectangular-section defaults derived from the geometry.
    pub fn rectangular(geom: &ElastomerGeometry) -> Self {
        Self {
            i1: geom.b1 * geom.t1 * geom.t1 * geom.t1 / 12.0,
            i2: geom.b1 * geom.t2 * geom.t2 * geom.t2 / 12.0,
            a5: geom.b1 * geom.t1,
            a6: geom.b1 * geom.t2,
        }
    }
}

/// Per-mechanism deflections of one half of the element, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionBreakdown {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
    /// Full gap change: `2*(d1+..+d6)`.
    pub total_dx: f64,
    /// Elongation of one half: `total_dx / 2`.
    pub half_dx: f64,
    /// Set when the second-lever bracket came out negative and `d6` was
    /// clamped to zero (possible when `a2 < a1`).
    pub d6_clamped: bool,
}

/// Structural verdict of [`check_allowable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllowableCheck {
    WithinLimit,
    Overload,
}

impl AllowableCheck {
    pub fn is_within_limit(self) -> bool {
        matches!(self, AllowableCheck::WithinLimit)
    }
}

/// Errors from geometry, material, or load validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ElastomerError {
    /// Applied force was NaN or infinite.
    NonFiniteForce { value: f64 },
    /// Applied force was negative; the element only carries tension.
    NegativeForce { value: f64 },
    InvalidGeometry { field: &'static str, value: f64 },
    InvalidMaterial { field: &'static str, value: f64 },
    InvalidSection { field: &'static str, value: f64 },
    /// Geometry produced zero deflection, so stiffness is undefined.
    DegenerateStiffness,
}

impl fmt::Display for ElastomerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFiniteForce { value } => write!(f, "force must be finite, got {value}"),
            Self::NegativeForce { value } => {
                write!(f, "force must be non-negative, got {value} N")
            }
            Self::InvalidGeometry { field, value } => {
                write!(f, "geometry field {field} must be finite and positive, got {value}")
            }
            Self::InvalidMaterial { field, value } => {
                write!(f, "material field {field} is out of range: {value}")
            }
            Self::InvalidSection { field, value } => {
                write!(f, "section property {field} must be finite and positive, got {value}")
            }
            Self::DegenerateStiffness => {
                write!(f, "geometry deflects by zero; stiffness undefined")
            }
        }
    }
}

impl core::error::Error for ElastomerError {}

fn validate_force(force_n: f64) -> Result<(), ElastomerError> {
    if !force_n.is_finite() {
        return Err(ElastomerError::NonFiniteForce { value: force_n });
    }
    if force_n < 0.0 {
        return Err(ElastomerError::NegativeForce { value: force_n });
    }
    Ok(())
}

/// Axial stretch of the four segments: `d_i = F*l_i/(E*A_i)`.
pub fn axial_deflections(
    force_n: f64,
    geom: &ElastomerGeometry,
    mat: &Material,
) -> Result<[f64; 4], ElastomerError> {
    validate_force(force_n)?;
    let e = mat.elastic_modulus;
    let [a1, a2, a3, a4] = geom.axial_areas();
    Ok([
        force_n * geom.l1 / (e * a1),
        force_n * geom.l2 / (e * a2),
        force_n * geom.l3 / (e * a3),
        force_n * geom.l4 / (e * a4),
    ])
}

/// Lever-arm deflections `(d5, d6)` from bending plus shear compliance.
///
/// The bracket of `d6` cancels exactly when the second member duplicates the
/// first (`a2 = a1`, `I2 = I1`, `A6 = A5`). A negative bracket (short second
/// arm) contradicts tensile elongation and is clamped to zero; the returned
/// flag reports the clamp.
pub fn shear_deflections(
    force_n: f64,
    geom: &ElastomerGeometry,
    sec: &SectionProperties,
    mat: &Material,
) -> Result<(f64, f64, bool), ElastomerError> {
    validate_force(force_n)?;
    let e = mat.elastic_modulus;
    let shear_rigidity = mat.shear_coefficient * mat.shear_modulus;

    let lever1 = geom.a1 / (e * sec.i1) + 1.0 / (shear_rigidity * sec.a5);
    let lever2 = geom.a2 / (e * sec.i2) + 1.0 / (shear_rigidity * sec.a6);

    let d5 = force_n * geom.a1 * geom.a1 * lever1;
    let bracket = geom.a2 * lever2 - geom.a1 * lever1;
    let d6_raw = force_n * geom.a2 * bracket;
    if d6_raw < 0.0 {
        Ok((d5, 0.0, true))
    } else {
        Ok((d5, d6_raw, false))
    }
}

/// Full deflection breakdown under tension `force_n`.
pub fn total_displacement(
    force_n: f64,
    geom: &ElastomerGeometry,
    sec: &SectionProperties,
    mat: &Material,
) -> Result<DeflectionBreakdown, ElastomerError> {
    let [d1, d2, d3, d4] = axial_deflections(force_n, geom, mat)?;
    let (d5, d6, d6_clamped) = shear_deflections(force_n, geom, sec, mat)?;
    let half_dx = d1 + d2 + d3 + d4 + d5 + d6;
    Ok(DeflectionBreakdown {
        d1,
        d2,
        d3,
        d4,
        d5,
        d6,
        total_dx: 2.0 * half_dx,
        half_dx,
        d6_clamped,
    })
}

/// Axial stiffness `k = F / total_dx(F)` in N/m.
///
/// The model is linear in force, so the ratio is force-independent; it is
/// evaluated at 1 N.
pub fn axial_stiffness(
    geom: &ElastomerGeometry,
    sec: &SectionProperties,
    mat: &Material,
) -> Result<f64, ElastomerError> {
    let breakdown = total_displacement(1.0, geom, sec, mat)?;
    if breakdown.total_dx <= 0.0 {
        return Err(ElastomerError::DegenerateStiffness);
    }
    Ok(1.0 / breakdown.total_dx)
}

/// Compares a load against [`ALLOWABLE_FORCE_N`] (boundary inclusive).
pub fn check_allowable(force_n: f64) -> AllowableCheck {
    if force_n <= ALLOWABLE_FORCE_N {
        AllowableCheck::WithinLimit
    } else {
        AllowableCheck::Overload
    }
}

/// Geometry field selected by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryParam {
    L1,
    L2,
    L3,
    L4,
    T1,
    T2,
    T3,
    A1,
    A2,
    B1,
}

impl GeometryParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::L1 => "l1",
            Self::L2 => "l2",
            Self::L3 => "l3",
            Self::L4 => "l4",
            Self::T1 => "t1",
            Self::T2 => "t2",
            Self::T3 => "t3",
            Self::A1 => "a1",
            Self::A2 => "a2",
            Self::B1 => "b1",
        }
    }

    fn apply(self, geom: &mut ElastomerGeometry, value: f64) {
        match self {
            Self::L1 => geom.l1 = value,
            Self::L2 => geom.l2 = value,
            Self::L3 => geom.l3 = value,
            Self::L4 => geom.l4 = value,
            Self::T1 => geom.t1 = value,
            Self::T2 => geom.t2 = value,
            Self::T3 => geom.t3 = value,
            Self::A1 => geom.a1 = value,
            Self::A2 => geom.a2 = value,
            Self::B1 => geom.b1 = value,
        }
    }
}

/// One swept parameter and the values it takes, in meters.
#[derive(Debug, Clone)]
pub struct SweepAxis {
    pub param: GeometryParam,
    pub values: Vec<f64>,
}

/// Evaluated grid point of a geometry sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub settings: Vec<(GeometryParam, f64)>,
    pub geometry: ElastomerGeometry,
    pub half_dx_m: f64,
    pub stiffness_n_per_m: f64,
    pub allowable: AllowableCheck,
}

/// Grid point rejected during a sweep, with the validation error.
#[derive(Debug, Clone)]
pub struct SweepSkip {
    pub settings: Vec<(GeometryParam, f64)>,
    pub reason: ElastomerError,
}

/// Result of [`sweep_geometry`]: records sorted by descending `half_dx_m`.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SweepSkip>,
}

/// Evaluates `half_dx` and stiffness over the cartesian grid of `axes`.
///
/// Section properties are re-derived per grid point with the rectangular
/// defaults, so thickness and depth sweeps act on the lever members too.
/// Invalid grid points (non-positive dimensions) are recorded as skipped.
/// With no axes the base geometry is the single record.
pub fn sweep_geometry(
    base: &ElastomerGeometry,
    axes: &[SweepAxis],
    mat: &Material,
    force_n: f64,
) -> Result<SweepOutcome, ElastomerError> {
    validate_force(force_n)?;
    for axis in axes {
        for &v in &axis.values {
            if !v.is_finite() {
                return Err(ElastomerError::InvalidGeometry {
                    field: axis.param.name(),
                    value: v,
                });
            }
        }
    }

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let grid_len: usize = axes.iter().map(|a| a.values.len()).product();
    if axes.iter().any(|a| a.values.is_empty()) {
        // An explicitly empty axis spans no grid points.
        return Ok(SweepOutcome {
            records,
            skipped,
        });
    }

    for flat in 0..grid_len {
        let mut geom = *base;
        let mut settings = Vec::with_capacity(axes.len());
        // Row-major: the last axis varies fastest.
        let mut rem = flat;
        for axis in axes.iter().rev() {
            let idx = rem % axis.values.len();
            rem /= axis.values.len();
            let value = axis.values[idx];
            axis.param.apply(&mut geom, value);
            settings.push((axis.param, value));
        }
        settings.reverse();

        if let Err(reason) = geom.validate() {
            skipped.push(SweepSkip { settings, reason });
            continue;
        }
        let sec = SectionProperties::rectangular(&geom);
        let breakdown = match total_displacement(force_n, &geom, &sec, mat) {
            Ok(b) => b,
            Err(reason) => {
                skipped.push(SweepSkip { settings, reason });
                continue;
            }
        };
        let stiffness = match axial_stiffness(&geom, &sec, mat) {
            Ok(k) => k,
            Err(reason) => {
                skipped.push(SweepSkip { settings, reason });
                continue;
            }
        };
        records.push(SweepRecord {
            settings,
            geometry: geom,
            half_dx_m: breakdown.half_dx,
            stiffness_n_per_m: stiffness,
            allowable: check_allowable(force_n),
        });
    }

    records.sort_by(|a, b| b.half_dx_m.total_cmp(&a.half_dx_m));
    Ok(SweepOutcome { records, skipped })
}
