//! Voltage-to-force calibration and the sensor metrics suite.
//!
//! The sensing chain is smooth but not linear, so the voltage-to-force map is
//! fitted with a cubic polynomial by least squares. Metrics follow the usual
//! force-sensor conventions:
//!
//! * RMSE of the calibrated output against the reference channel.
//! * Nonlinearity: largest deviation of the loading curve from its own
//!   least-squares line, as a percentage of full scale.
//! * Hysteresis: largest loading/unloading gap at equal reference force, as a
//!   percentage of full scale.
//! * Resolution: standard deviation over a stationary interval, plus the
//!   full-scale step count it implies.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Rated force span used for percentage-of-full-scale metrics, in newtons.
pub const RATED_FULL_SCALE_N: f64 = 200.0;

/// Full scale for resolution step counts: the structural maximum.
///
/// Steps are counted against the verified maximum load rather than the rated
/// span, matching how the sensor's step figure is derived.
pub const STEP_FULL_SCALE_N: f64 = crate::elastomer::ALLOWABLE_FORCE_N;

/// Polynomial voltage-to-force map with its fit provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPoly {
    /// `c[k]` multiplies `v^k`; force in newtons for voltage in volts.
    pub coefficients: Vec<f64>,
    /// Voltage interval covered by the fit data.
    pub fit_range: (f64, f64),
    /// RMS force residual on the training data, in newtons.
    pub residual_rmse: f64,
}

/// Force estimate plus an extrapolation marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyValue {
    pub force_n: f64,
    /// Set when the voltage fell outside the fitted range.
    pub extrapolated: bool,
}

impl CalibrationPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Horner evaluation at voltage `v`, flagging extrapolation.
    pub fn eval(&self, v: f64) -> PolyValue {
        PolyValue {
            force_n: self.force(v),
            extrapolated: v < self.fit_range.0 || v > self.fit_range.1,
        }
    }

    /// Horner evaluation without the range check.
    pub fn force(&self, v: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * v + c;
        }
        acc
    }

    /// Derivative dF/dv at voltage `v`.
    pub fn derivative(&self, v: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc * v + k as f64 * c;
        }
        acc
    }

    /// True when dF/dv keeps one sign across the fit range (sampled on a
    /// 257-point grid), i.e. the map is invertible on its branch.
    pub fn monotone_on_fit_range(&self) -> bool {
        let (lo, hi) = self.fit_range;
        if lo.is_nan() || hi.is_nan() || hi <= lo {
            return false;
        }
        let first = self.derivative(lo);
        if first == 0.0 {
            return false;
        }
        let positive = first > 0.0;
        for k in 1..=256 {
            let v = lo + (hi - lo) * k as f64 / 256.0;
            let d = self.derivative(v);
            if d == 0.0 || (d > 0.0) != positive {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibError {
    /// Fewer than `degree + 1` points with distinct voltages.
    TooFewDistinctPoints { distinct: usize, needed: usize },
    NonFiniteInput,
    /// Normal equations were numerically singular.
    RankDeficient,
    /// Predicted and reference series differ in length.
    LengthMismatch { left: usize, right: usize },
    EmptyInput,
    /// Reference forces must be sorted ascending for curve metrics.
    UnsortedReference,
    /// The loading curve has no force span to fit a line through.
    DegenerateCurve,
    /// Loading and unloading curves share no reference-force range.
    NonOverlappingRanges,
    /// A stationary series with zero variance has no defined resolution.
    DegenerateResolution,
    /// Resolution needs at least two samples.
    TooFewSamples { len: usize },
}

impl fmt::Display for CalibError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewDistinctPoints { distinct, needed } => write!(
                f,
                "fit needs {needed} points with distinct voltages, got {distinct}"
            ),
            Self::NonFiniteInput => write!(f, "input contains NaN or infinite values"),
            Self::RankDeficient => write!(f, "least-squares system is rank deficient"),
            Self::LengthMismatch { left, right } => {
                write!(f, "series lengths differ: {left} vs {right}")
            }
            Self::EmptyInput => write!(f, "input series is empty"),
            Self::UnsortedReference => {
                write!(f, "reference forces must be sorted ascending")
            }
            Self::DegenerateCurve => {
                write!(f, "curve spans no reference-force range")
            }
            Self::NonOverlappingRanges => {
                write!(f, "loading and unloading curves do not overlap in force")
            }
            Self::DegenerateResolution => {
                write!(f, "stationary series has zero variance; resolution undefined")
            }
            Self::TooFewSamples { len } => {
                write!(f, "resolution needs at least 2 samples, got {len}")
            }
        }
    }
}

impl core::error::Error for CalibError {}

/// Least-squares polynomial fit of force against voltage.
///
/// Voltages are mean-centered and half-range-scaled before the normal
/// equations are solved, then the coefficients are expanded back to raw
/// volts; degree-3 fits on a narrow voltage span are ill-conditioned without
/// this.
pub fn fit_poly(pairs: &[(f64, f64)], degree: usize) -> Result<CalibrationPoly, CalibError> {
    let needed = degree + 1;
    if pairs.iter().any(|(v, f)| !v.is_finite() || !f.is_finite()) {
        return Err(CalibError::NonFiniteInput);
    }
    let distinct = {
        let mut volts: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
        volts.sort_by(f64::total_cmp);
        volts.dedup();
        volts.len()
    };
    if distinct < needed {
        return Err(CalibError::TooFewDistinctPoints { distinct, needed });
    }

    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut v_sum = 0.0;
    for &(v, _) in pairs {
        v_min = v_min.min(v);
        v_max = v_max.max(v);
        v_sum += v;
    }
    let center = v_sum / pairs.len() as f64;
    let scale = (v_max - v_min) / 2.0;
    debug_assert!(scale > 0.0, "distinct check guarantees a span");

    // Normal equations in the scaled variable z = (v - center)/scale.
    let n = needed;
    let mut moments = vec![0.0; 2 * degree + 1];
    let mut rhs = vec![0.0; n];
    for &(v, f) in pairs {
        let z = (v - center) / scale;
        let mut zk = 1.0;
        for (j, m) in moments.iter_mut().enumerate() {
            *m += zk;
            if j < n {
                rhs[j] += f * zk;
            }
            zk *= z;
        }
    }
    let mut matrix = vec![0.0; n * n];
    for row in 0..n {
        for col in 0..n {
            matrix[row * n + col] = moments[row + col];
        }
    }
    let scaled = solve_dense(&mut matrix, &mut rhs, n).ok_or(CalibError::RankDeficient)?;

    // Expand sum d_k z^k back to powers of raw v.
    let shifted: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(k, &d)| d / math::powi(scale, k as i32))
        .collect();
    let coefficients = expand_shifted(&shifted, center);

    let mut poly = CalibrationPoly {
        coefficients,
        fit_range: (v_min, v_max),
        residual_rmse: 0.0,
    };
    let mut rss = 0.0;
    for &(v, f) in pairs {
        let r = f - poly.force(v);
        rss += r * r;
    }
    poly.residual_rmse = math::sqrt(rss / pairs.len() as f64);
    Ok(poly)
}

/// Gaussian elimination with partial pivoting on an `n x n` system.
fn solve_dense(matrix: &mut [f64], rhs: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let mut scale_ref = 0.0f64;
    for &m in matrix.iter() {
        scale_ref = scale_ref.max(m.abs());
    }
    if scale_ref == 0.0 {
        return None;
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = matrix[col * n + col].abs();
        for row in col + 1..n {
            let mag = matrix[row * n + col].abs();
            if mag > pivot_mag {
                pivot_row = row;
                pivot_mag = mag;
            }
        }
        if pivot_mag <= 1e-13 * scale_ref {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                matrix.swap(col * n + j, pivot_row * n + j);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = matrix[col * n + col];
        for row in col + 1..n {
            let factor = matrix[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                matrix[row * n + j] -= factor * matrix[col * n + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= matrix[col * n + j] * x[j];
        }
        x[col] = acc / matrix[col * n + col];
    }
    Some(x)
}

/// Expands `sum e_k (x - shift)^k` into plain powers of `x`.
fn expand_shifted(e: &[f64], shift: f64) -> Vec<f64> {
    let mut c = vec![0.0; e.len()];
    for &ek in e.iter().rev() {
        // c(x) <- c(x)*(x - shift) + ek
        for j in (1..c.len()).rev() {
            c[j] = c[j - 1] - shift * c[j];
        }
        c[0] = -shift * c[0] + ek;
    }
    c
}

/// Root-mean-square error between two equal-length force series.
pub fn rmse(predicted: &[f64], truth: &[f64]) -> Result<f64, CalibError> {
    if predicted.len() != truth.len() {
        return Err(CalibError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(CalibError::EmptyInput);
    }
    let sum: f64 = predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(math::sqrt(sum / predicted.len() as f64))
}

/// Nonlinearity of a loading curve in percent of full scale.
///
/// `curve` holds `(reference force, measured force)` ordered by ascending
/// reference. The deviation is taken against the curve's own least-squares
/// line.
pub fn nonlinearity(curve: &[(f64, f64)], full_scale_n: f64) -> Result<f64, CalibError> {
    if curve.len() < 2 {
        return Err(CalibError::TooFewSamples { len: curve.len() });
    }
    if curve.iter().any(|(r, m)| !r.is_finite() || !m.is_finite()) {
        return Err(CalibError::NonFiniteInput);
    }
    if curve.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(CalibError::UnsortedReference);
    }
    let (slope, intercept) = least_squares_line(curve)?;
    let mut worst = 0.0f64;
    for &(r, m) in curve {
        let dev = (m - (slope * r + intercept)).abs();
        worst = worst.max(dev);
    }
    Ok(worst / full_scale_n * 100.0)
}

fn least_squares_line(points: &[(f64, f64)]) -> Result<(f64, f64), CalibError> {
    let n = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(CalibError::DegenerateCurve);
    }
    let slope = sxy / sxx;
    Ok((slope, y_mean - slope * x_mean))
}

/// Hysteresis between loading and unloading curves in percent of full scale.
///
/// Both curves are `(reference force, measured force)` ordered by ascending
/// reference. They are compared over their common reference range, evaluated
/// at every knot of either curve by linear interpolation, so the extremum of
/// the piecewise-linear gap is found exactly.
pub fn hysteresis(
    loading: &[(f64, f64)],
    unloading: &[(f64, f64)],
    full_scale_n: f64,
) -> Result<f64, CalibError> {
    let up = prepare_curve(loading)?;
    let down = prepare_curve(unloading)?;
    let lo = up[0].0.max(down[0].0);
    let hi = up[up.len() - 1].0.min(down[down.len() - 1].0);
    if hi < lo {
        return Err(CalibError::NonOverlappingRanges);
    }

    let mut worst = 0.0f64;
    let mut probe = |r: f64| {
        if r < lo || r > hi {
            return;
        }
        let gap = (interpolate(&up, r) - interpolate(&down, r)).abs();
        worst = worst.max(gap);
    };
    for &(r, _) in &up {
        probe(r);
    }
    for &(r, _) in &down {
        probe(r);
    }
    probe(lo);
    probe(hi);
    Ok(worst / full_scale_n * 100.0)
}

/// Sorts by reference and averages duplicate reference entries.
fn prepare_curve(curve: &[(f64, f64)]) -> Result<Vec<(f64, f64)>, CalibError> {
    if curve.is_empty() {
        return Err(CalibError::EmptyInput);
    }
    if curve.iter().any(|(r, m)| !r.is_finite() || !m.is_finite()) {
        return Err(CalibError::NonFiniteInput);
    }
    let mut sorted = curve.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let r = sorted[i].0;
        let mut sum = 0.0;
        let mut count = 0.0;
        while i < sorted.len() && sorted[i].0 == r {
            sum += sorted[i].1;
            count += 1.0;
            i += 1;
        }
        out.push((r, sum / count));
    }
    Ok(out)
}

fn interpolate(curve: &[(f64, f64)], r: f64) -> f64 {
    match curve.binary_search_by(|p| p.0.total_cmp(&r)) {
        Ok(i) => curve[i].1,
        Err(0) => curve[0].1,
        Err(i) if i == curve.len() => curve[curve.len() - 1].1,
        Err(i) => {
            let (x0, y0) = curve[i - 1];
            let (x1, y1) = curve[i];
            y0 + (y1 - y0) * (r - x0) / (x1 - x0)
        }
    }
}

/// Resolution of a stationary force series: the sample standard deviation and
/// the discrete step count `floor(full_scale / resolution)`.
pub fn resolution(series: &[f64], full_scale_n: f64) -> Result<(f64, u64), CalibError> {
    if series.len() < 2 {
        return Err(CalibError::TooFewSamples { len: series.len() });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(CalibError::NonFiniteInput);
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let std = math::sqrt(var);
    if std == 0.0 {
        return Err(CalibError::DegenerateResolution);
    }
    let steps = math::floor(full_scale_n / std) as u64;
    Ok((std, steps))
}

/// Calibration-experiment results in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rmse_n: f64,
    pub nonlinearity_pct: f64,
    pub hysteresis_pct: f64,
    /// Stationary standard deviation in newtons, when a stationary segment
    /// was supplied.
    pub resolution_n: Option<f64>,
    pub resolution_steps: Option<u64>,
    pub full_scale_n: f64,
    pub sample_rate_hz: f64,
}
