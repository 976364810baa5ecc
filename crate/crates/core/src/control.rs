//! Closed-loop force control against a twisted-string actuator.
//!
//! The plant is the standard helix model of a string pair twisted by a motor:
//! contraction `x = L0 - sqrt(L0^2 - (r*theta)^2)`, loaded through the sensor
//! spring (`tension = k * max(0, x - slack)`). The motor contributes a
//! first-order velocity lag and a speed ceiling. A PI controller with
//! clamped-integration anti-windup closes the loop on the *calibrated* force
//! estimate, i.e. the plant tension is measured through the full optics, ADC,
//! and polynomial chain, noise included.
//!
//! The twist angle is kept non-negative by a bottom stop: below zero twist
//! the contraction is an even function of the angle and the plant gain flips
//! sign, so drive firmware parks the motor at the untwisted position instead.

use alloc::vec::Vec;
use core::fmt;

use crate::adc::{self, AdcConfig, AdcError};
use crate::calib::CalibrationPoly;
use crate::math;
use crate::noise::{NoiseModel, NoiseStream};
use crate::optics::{OpticsError, SensingChain};
use crate::stream::MAX_SAMPLE_RATE_HZ;

#[derive(Debug, Clone, PartialEq)]
pub enum ControlError {
    /// `|r*theta|` reached the string length; the helix model is undefined.
    KinematicLimit { theta_rad: f64, limit_rad: f64 },
    InvalidPlant { field: &'static str, value: f64 },
    InvalidController { field: &'static str, value: f64 },
    InvalidProfile { what: &'static str, value: f64 },
    InvalidConfig { what: &'static str, value: f64 },
    /// Rectified-sine runs have no natural length; pass a duration.
    MissingDuration,
    Sensing(OpticsError),
    Adc(AdcError),
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KinematicLimit {
                theta_rad,
                limit_rad,
            } => write!(
                f,
                "twist {theta_rad} rad reaches the kinematic limit ({limit_rad} rad)"
            ),
            Self::InvalidPlant { field, value } => {
                write!(f, "plant field {field} is out of range: {value}")
            }
            Self::InvalidController { field, value } => {
                write!(f, "controller field {field} is out of range: {value}")
            }
            Self::InvalidProfile { what, value } => {
                write!(f, "invalid profile parameter: {what} = {value}")
            }
            Self::InvalidConfig { what, value } => {
                write!(f, "invalid experiment parameter: {what} = {value}")
            }
            Self::MissingDuration => {
                write!(f, "profile has no natural duration; specify one")
            }
            Self::Sensing(e) => write!(f, "{e}"),
            Self::Adc(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ControlError {}

impl From<OpticsError> for ControlError {
    fn from(e: OpticsError) -> Self {
        Self::Sensing(e)
    }
}

impl From<AdcError> for ControlError {
    fn from(e: AdcError) -> Self {
        Self::Adc(e)
    }
}

/// String contraction of the helix model (meters).
///
/// `x(0) = 0`, strictly increasing in `|theta|`, undefined once
/// `|r*theta| >= l0`.
pub fn tsa_contraction(theta_rad: f64, l0_m: f64, r_m: f64) -> Result<f64, ControlError> {
    let wound = r_m * theta_rad;
    if wound.abs() >= l0_m {
        return Err(ControlError::KinematicLimit {
            theta_rad,
            limit_rad: l0_m / r_m,
        });
    }
    Ok(l0_m - math::sqrt(l0_m * l0_m - wound * wound))
}

/// Twisted-string actuator in series with the sensor spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsaPlant {
    /// Untwisted string length L0 (m).
    pub string_length_m: f64,
    /// String radius r (m).
    pub string_radius_m: f64,
    /// Motor velocity time constant (s).
    pub motor_time_constant_s: f64,
    /// Speed ceiling (rad/s); commands are normalized to it.
    pub max_speed_rad_s: f64,
    /// Series stiffness of the sensor spring (N/m).
    pub series_stiffness_n_per_m: f64,
    /// Contraction consumed before the string goes taut (m).
    pub slack_offset_m: f64,
    /// Motor twist angle (rad), kept non-negative by the bottom stop.
    pub theta_rad: f64,
    /// Motor speed (rad/s).
    pub speed_rad_s: f64,
}

impl TsaPlant {
    pub fn new(
        string_length_m: f64,
        string_radius_m: f64,
        motor_time_constant_s: f64,
        max_speed_rad_s: f64,
        series_stiffness_n_per_m: f64,
        slack_offset_m: f64,
    ) -> Result<Self, ControlError> {
        let positive = [
            ("string_length_m", string_length_m),
            ("string_radius_m", string_radius_m),
            ("motor_time_constant_s", motor_time_constant_s),
            ("max_speed_rad_s", max_speed_rad_s),
            ("series_stiffness_n_per_m", series_stiffness_n_per_m),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ControlError::InvalidPlant { field, value });
            }
        }
        if !(slack_offset_m.is_finite() && slack_offset_m >= 0.0) {
            return Err(ControlError::InvalidPlant {
                field: "slack_offset_m",
                value: slack_offset_m,
            });
        }
        Ok(Self {
            string_length_m,
            string_radius_m,
            motor_time_constant_s,
            max_speed_rad_s,
            series_stiffness_n_per_m,
            slack_offset_m,
            theta_rad: 0.0,
            speed_rad_s: 0.0,
        })
    }

    /// Fingertip-scale actuator: 100 mm string pair of 0.75 mm radius,
    /// 20 ms motor lag, 500 rad/s ceiling, no slack.
    pub fn reference(series_stiffness_n_per_m: f64) -> Result<Self, ControlError> {
        Self::new(0.1, 0.75e-3, 0.02, 500.0, series_stiffness_n_per_m, 0.0)
    }

    /// String tension at the current state (N); never negative.
    pub fn tension_n(&self) -> Result<f64, ControlError> {
        let x = tsa_contraction(self.theta_rad, self.string_length_m, self.string_radius_m)?;
        Ok(self.series_stiffness_n_per_m * (x - self.slack_offset_m).max(0.0))
    }

    /// Advances the plant by `dt_s` under a normalized command in [-1, 1]
    /// (clamped) and returns the new tension.
    pub fn step(&mut self, command: f64, dt_s: f64) -> Result<f64, ControlError> {
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(ControlError::InvalidPlant {
                field: "dt_s",
                value: dt_s,
            });
        }
        let command = if command.is_nan() {
            0.0
        } else {
            command.clamp(-1.0, 1.0)
        };
        let target = command * self.max_speed_rad_s;
        let decay = math::exp(-dt_s / self.motor_time_constant_s);
        self.speed_rad_s = target + (self.speed_rad_s - target) * decay;
        self.theta_rad += self.speed_rad_s * dt_s;
        if self.theta_rad < 0.0 {
            // Bottom stop at zero twist.
            self.theta_rad = 0.0;
            self.speed_rad_s = 0.0;
        }
        self.tension_n()
    }
}

/// PI controller with output limits and clamped-integration anti-windup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiController {
    /// Proportional gain (command per N).
    pub kp: f64,
    /// Integral gain (command per N per s).
    pub ki: f64,
    /// Control period (s).
    pub dt_s: f64,
    /// Integrator state (N*s).
    pub integrator: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Clamped integration: freeze the integrator while the output is
    /// saturated and the error would deepen saturation.
    pub anti_windup: bool,
    last_output: f64,
}

impl PiController {
    pub fn new(
        kp: f64,
        ki: f64,
        dt_s: f64,
        limits: (f64, f64),
        anti_windup: bool,
    ) -> Result<Self, ControlError> {
        if !(kp.is_finite() && kp >= 0.0) {
            return Err(ControlError::InvalidController {
                field: "kp",
                value: kp,
            });
        }
        if !(ki.is_finite() && ki >= 0.0) {
            return Err(ControlError::InvalidController {
                field: "ki",
                value: ki,
            });
        }
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(ControlError::InvalidController {
                field: "dt_s",
                value: dt_s,
            });
        }
        if !(limits.0.is_finite() && limits.1.is_finite() && limits.1 > limits.0) {
            return Err(ControlError::InvalidController {
                field: "limits",
                value: limits.1,
            });
        }
        Ok(Self {
            kp,
            ki,
            dt_s,
            integrator: 0.0,
            u_min: limits.0,
            u_max: limits.1,
            anti_windup,
            last_output: 0.0,
        })
    }

    /// Gains tuned for the reference plant at 1 kHz: settles each staircase
    /// level well inside a second without measurable steady-state error.
    pub fn reference() -> Self {
        Self::new(3.0e-3, 2.0e-2, 1.0e-3, (-1.0, 1.0), true).unwrap()
    }

    /// One control update; returns the clamped command.
    pub fn step(&mut self, reference_n: f64, measured_n: f64) -> f64 {
        let error = reference_n - measured_n;
        let deepening = (self.last_output >= self.u_max && error > 0.0)
            || (self.last_output <= self.u_min && error < 0.0);
        if !(self.anti_windup && deepening) {
            self.integrator += error * self.dt_s;
        }
        if self.anti_windup && self.ki > 0.0 {
            // Keep the integral term alone inside the output range.
            self.integrator = self
                .integrator
                .clamp(self.u_min / self.ki, self.u_max / self.ki);
        }
        let output = (self.kp * error + self.ki * self.integrator).clamp(self.u_min, self.u_max);
        self.last_output = output;
        output
    }

    pub fn reset(&mut self) {
        self.integrator = 0.0;
        self.last_output = 0.0;
    }
}

/// Target force profiles of the control experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceProfile {
    /// Step levels held for `dwell_s` each; the last level holds forever.
    Staircase { levels: Vec<f64>, dwell_s: f64 },
    /// `trials` cycles of half a period at rest, half at `amplitude_n`.
    RepeatedStep {
        amplitude_n: f64,
        trials: u32,
        period_s: f64,
    },
    /// `amplitude_n * |sin(2*pi*f*t)|`.
    RectifiedSine {
        amplitude_n: f64,
        frequency_hz: f64,
    },
}

impl ReferenceProfile {
    /// 10/20/30/40/50 N held 3 s each.
    pub fn default_staircase() -> Self {
        Self::Staircase {
            levels: alloc::vec![10.0, 20.0, 30.0, 40.0, 50.0],
            dwell_s: 3.0,
        }
    }

    /// Ten 30 N steps, 3 s period.
    pub fn default_repeated_step() -> Self {
        Self::RepeatedStep {
            amplitude_n: 30.0,
            trials: 10,
            period_s: 3.0,
        }
    }

    /// 20 N rectified sine at 0.5 Hz.
    pub fn default_rectified_sine() -> Self {
        Self::RectifiedSine {
            amplitude_n: 20.0,
            frequency_hz: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |what: &'static str, value: f64| ControlError::InvalidProfile { what, value };
        match self {
            Self::Staircase { levels, dwell_s } => {
                if levels.is_empty() {
                    return Err(bad("staircase levels", 0.0));
                }
                for &l in levels {
                    if !(l.is_finite() && l >= 0.0) {
                        return Err(bad("staircase level", l));
                    }
                }
                if !(dwell_s.is_finite() && *dwell_s > 0.0) {
                    return Err(bad("staircase dwell", *dwell_s));
                }
            }
            Self::RepeatedStep {
                amplitude_n,
                trials,
                period_s,
            } => {
                if !(amplitude_n.is_finite() && *amplitude_n >= 0.0) {
                    return Err(bad("step amplitude", *amplitude_n));
                }
                if *trials == 0 {
                    return Err(bad("step trials", 0.0));
                }
                if !(period_s.is_finite() && *period_s > 0.0) {
                    return Err(bad("step period", *period_s));
                }
            }
            Self::RectifiedSine {
                amplitude_n,
                frequency_hz,
            } => {
                if !(amplitude_n.is_finite() && *amplitude_n >= 0.0) {
                    return Err(bad("sine amplitude", *amplitude_n));
                }
                if !(frequency_hz.is_finite() && *frequency_hz > 0.0) {
                    return Err(bad("sine frequency", *frequency_hz));
                }
            }
        }
        Ok(())
    }

    /// Reference force at time `t` seconds; never negative.
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Self::Staircase { levels, dwell_s } => {
                let idx = (math::floor(t / dwell_s) as usize).min(levels.len() - 1);
                levels[idx]
            }
            Self::RepeatedStep {
                amplitude_n,
                period_s,
                ..
            } => {
                let phase = math::rem_euclid(t, *period_s);
                if phase < period_s / 2.0 {
                    0.0
                } else {
                    *amplitude_n
                }
            }
            Self::RectifiedSine {
                amplitude_n,
                frequency_hz,
            } => amplitude_n * math::sin(2.0 * math::PI * frequency_hz * t).abs(),
        }
    }

    /// Run length implied by the profile, if any.
    pub fn natural_duration_s(&self) -> Option<f64> {
        match self {
            Self::Staircase { levels, dwell_s } => Some(levels.len() as f64 * dwell_s),
            Self::RepeatedStep {
                trials, period_s, ..
            } => Some(f64::from(*trials) * period_s),
            Self::RectifiedSine { .. } => None,
        }
    }
}

/// The measurement side of the loop: plant tension in, calibrated force out.
#[derive(Debug, Clone)]
pub struct ForceSensor {
    pub chain: SensingChain,
    pub adc: AdcConfig,
    pub noise: NoiseModel,
    pub poly: CalibrationPoly,
}

impl ForceSensor {
    /// Measures a true tension through optics, noise, ADC, and calibration.
    ///
    /// The estimate is clamped at zero: the string cannot push, so negative
    /// excursions are noise artifacts.
    pub fn measure(
        &self,
        true_force_n: f64,
        temperature_c: f64,
        noise: &mut NoiseStream,
    ) -> Result<f64, ControlError> {
        let volts = self
            .chain
            .sensor_voltage(true_force_n, temperature_c, noise)?;
        let counts = adc::quantize(volts, &self.adc);
        let decoded = adc::counts_to_voltage(counts, &self.adc)?;
        Ok(self.poly.force(decoded).max(0.0))
    }
}

/// Simulation settings for [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Run length; defaults to the profile's natural duration.
    pub duration_s: Option<f64>,
    /// Control loop rate (Hz), at most the 5 kHz sensing ceiling.
    pub control_rate_hz: f64,
    pub temperature_c: f64,
    /// Settling time excluded from each steady-state window.
    pub settle_s: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            duration_s: None,
            control_rate_hz: 1000.0,
            temperature_c: 25.0,
            settle_s: 1.0,
        }
    }
}

/// One control tick of the trajectory log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time_s: f64,
    pub reference_n: f64,
    pub measured_n: f64,
    pub command: f64,
}

/// Steady-state error of one dwell segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateError {
    pub level_n: f64,
    pub window_start_s: f64,
    pub window_end_s: f64,
    /// Mean of (measured - reference) over the window.
    pub mean_error_n: f64,
}

/// Post-run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    /// RMSE of measured against reference over the whole log; `None` for an
    /// empty run.
    pub rmse_n: Option<f64>,
    /// Per-dwell steady-state errors (staircase and repeated-step runs).
    pub steady_state: Vec<SteadyStateError>,
    /// Rising edges to the step amplitude (repeated-step runs).
    pub rising_edges: Option<u32>,
}

/// A finished (or aborted) experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub trajectory: Vec<TrajectoryPoint>,
    pub dt_s: f64,
    pub summary: ExperimentSummary,
    /// Set when the run aborted early; the trajectory holds the partial log.
    pub abort: Option<ControlError>,
}

/// Runs a closed-loop experiment at `control_rate_hz`.
///
/// Each tick measures the plant through the calibrated sensing chain, updates
/// the PI controller, and advances the plant. Kinematic or sensing failures
/// abort the run but keep the partial trajectory.
pub fn run_experiment(
    profile: &ReferenceProfile,
    plant: &mut TsaPlant,
    controller: &mut PiController,
    sensor: &ForceSensor,
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome, ControlError> {
    profile.validate()?;
    if !(config.control_rate_hz.is_finite() && config.control_rate_hz > 0.0) {
        return Err(ControlError::InvalidConfig {
            what: "control_rate_hz",
            value: config.control_rate_hz,
        });
    }
    if config.control_rate_hz > MAX_SAMPLE_RATE_HZ {
        return Err(ControlError::InvalidConfig {
            what: "control_rate_hz (sensing tops out at 5000 Hz)",
            value: config.control_rate_hz,
        });
    }
    if !(config.settle_s.is_finite() && config.settle_s >= 0.0) {
        return Err(ControlError::InvalidConfig {
            what: "settle_s",
            value: config.settle_s,
        });
    }
    let duration = match config.duration_s {
        Some(d) if d.is_finite() && d >= 0.0 => d,
        Some(d) => {
            return Err(ControlError::InvalidConfig {
                what: "duration_s",
                value: d,
            })
        }
        None => profile
            .natural_duration_s()
            .ok_or(ControlError::MissingDuration)?,
    };

    let dt = 1.0 / config.control_rate_hz;
    let exact = config.control_rate_hz * duration;
    let ticks = if exact <= 0.0 {
        0
    } else {
        math::ceil(exact - 1e-9 * exact.max(1.0)) as usize
    };

    let mut noise = sensor.noise.stream();
    let mut trajectory = Vec::with_capacity(ticks);
    let mut abort = None;
    for k in 0..ticks {
        let time_s = k as f64 * dt;
        let reference_n = profile.value_at(time_s);
        let tick = (|| -> Result<TrajectoryPoint, ControlError> {
            let tension = plant.tension_n()?;
            let measured_n = sensor.measure(tension, config.temperature_c, &mut noise)?;
            let command = controller.step(reference_n, measured_n);
            plant.step(command, dt)?;
            Ok(TrajectoryPoint {
                time_s,
                reference_n,
                measured_n,
                command,
            })
        })();
        match tick {
            Ok(point) => trajectory.push(point),
            Err(e) => {
                abort = Some(e);
                break;
            }
        }
    }

    let summary = summarize(profile, &trajectory, dt, config.settle_s);
    Ok(ExperimentOutcome {
        trajectory,
        dt_s: dt,
        summary,
        abort,
    })
}

fn summarize(
    profile: &ReferenceProfile,
    trajectory: &[TrajectoryPoint],
    dt: f64,
    settle_s: f64,
) -> ExperimentSummary {
    let rmse_n = if trajectory.is_empty() {
        None
    } else {
        let sum: f64 = trajectory
            .iter()
            .map(|p| {
                let e = p.measured_n - p.reference_n;
                e * e
            })
            .sum();
        Some(math::sqrt(sum / trajectory.len() as f64))
    };

    let end_s = trajectory.len() as f64 * dt;
    let mut steady_state = Vec::new();
    let mut window = |level_n: f64, start_s: f64, stop_s: f64| {
        let start_s = start_s + settle_s;
        let stop_s = stop_s.min(end_s);
        if stop_s <= start_s {
            return;
        }
        let lo = math::ceil(start_s / dt) as usize;
        let hi = (math::ceil(stop_s / dt) as usize).min(trajectory.len());
        if lo >= hi {
            return;
        }
        let points = &trajectory[lo..hi];
        let mean = points
            .iter()
            .map(|p| p.measured_n - p.reference_n)
            .sum::<f64>()
            / points.len() as f64;
        steady_state.push(SteadyStateError {
            level_n,
            window_start_s: start_s,
            window_end_s: stop_s,
            mean_error_n: mean,
        });
    };
    match profile {
        ReferenceProfile::Staircase { levels, dwell_s } => {
            for (i, &level) in levels.iter().enumerate() {
                window(level, i as f64 * dwell_s, (i + 1) as f64 * dwell_s);
            }
        }
        ReferenceProfile::RepeatedStep {
            amplitude_n,
            trials,
            period_s,
        } => {
            for i in 0..*trials {
                let start = f64::from(i) * period_s + period_s / 2.0;
                window(*amplitude_n, start, f64::from(i + 1) * period_s);
            }
        }
        ReferenceProfile::RectifiedSine { .. } => {}
    }

    let rising_edges = match profile {
        ReferenceProfile::RepeatedStep { amplitude_n, .. } => {
            let mut edges = 0u32;
            for pair in trajectory.windows(2) {
                if pair[1].reference_n >= *amplitude_n && pair[0].reference_n < *amplitude_n {
                    edges += 1;
                }
            }
            Some(edges)
        }
        _ => None,
    };

    ExperimentSummary {
        rmse_n,
        steady_state,
        rising_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn contraction_zero_at_rest() {
        assert_eq!(tsa_contraction(0.0, 0.1, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn contraction_closed_form_value() {
        // 0.1 - sqrt(0.01 - 0.0025)
        let x = tsa_contraction(50.0, 0.1, 1e-3).unwrap();
        assert!((x - 0.013397459621556124).abs() < 1e-15, "x = {x}");
    }

    #[test]
    fn contraction_limit_error() {
        assert!(matches!(
            tsa_contraction(100.0, 0.1, 1e-3),
            Err(ControlError::KinematicLimit { .. })
        ));
        assert!(matches!(
            tsa_contraction(150.0, 0.1, 1e-3),
            Err(ControlError::KinematicLimit { .. })
        ));
    }

    #[test]
    fn contraction_increases_with_twist() {
        let mut prev = 0.0;
        for k in 1..90 {
            let x = tsa_contraction(k as f64, 0.1, 1e-3).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    fn test_plant() -> TsaPlant {
        TsaPlant::reference(2.103918e6).unwrap()
    }

    #[test]
    fn plant_at_rest_stays_at_rest() {
        let mut plant = test_plant();
        let before = plant;
        let tension = plant.step(0.0, 1e-3).unwrap();
        assert_eq!(tension, 0.0);
        assert_eq!(plant, before);
    }

    #[test]
    fn plant_slack_produces_zero_tension() {
        let mut plant = test_plant();
        plant.slack_offset_m = 5e-5;
        // Wind up a little: still inside the slack band.
        for _ in 0..40 {
            let tension = plant.step(0.2, 1e-3).unwrap();
            assert_eq!(tension, 0.0, "tension while slack at theta {}", plant.theta_rad);
        }
        assert!(plant.theta_rad > 0.0);
    }

    #[test]
    fn plant_constant_command_monotone_tension() {
        let mut plant = test_plant();
        let mut prev = 0.0;
        for _ in 0..1500 {
            let tension = plant.step(0.02, 1e-3).unwrap();
            assert!(tension >= prev);
            prev = tension;
        }
        assert!(prev > 0.0);
    }

    #[test]
    fn plant_errors_at_kinematic_limit() {
        let mut plant = test_plant();
        let mut saw_limit = false;
        for _ in 0..5000 {
            if let Err(ControlError::KinematicLimit { .. }) = plant.step(1.0, 1e-3) {
                saw_limit = true;
                break;
            }
        }
        assert!(saw_limit);
    }

    #[test]
    fn plant_bottom_stop_holds() {
        let mut plant = test_plant();
        for _ in 0..100 {
            plant.step(-0.5, 1e-3).unwrap();
        }
        assert_eq!(plant.theta_rad, 0.0);
        assert_eq!(plant.tension_n().unwrap(), 0.0);
    }

    #[test]
    fn plant_never_negative_tension() {
        let mut plant = test_plant();
        for k in 0..5000 {
            let command = math::sin(k as f64 * 0.01);
            let tension = plant.step(command, 1e-3).unwrap();
            assert!(tension >= 0.0);
        }
    }

    #[test]
    fn pi_zero_error_zero_output() {
        let mut pi = PiController::reference();
        assert_eq!(pi.step(0.0, 0.0), 0.0);
    }

    #[test]
    fn pi_proportional_only() {
        let mut pi = PiController::new(1.0, 0.0, 1e-3, (-10.0, 10.0), true).unwrap();
        assert_eq!(pi.step(2.0, 0.0), 2.0);
    }

    #[test]
    fn pi_freezes_integrator_while_deepening_saturation() {
        let mut pi = PiController::new(0.5, 1.0, 1e-3, (-1.0, 1.0), true).unwrap();
        // Drive into saturation.
        let u = pi.step(100.0, 0.0);
        assert_eq!(u, 1.0);
        let frozen = pi.integrator;
        for _ in 0..50 {
            let u = pi.step(100.0, 0.0);
            assert_eq!(u, 1.0);
            assert_eq!(pi.integrator, frozen, "integrator moved while clamped");
        }
        // An error that relieves saturation integrates again.
        pi.step(-1.0, 0.0);
        assert!(pi.integrator < frozen);
    }

    #[test]
    fn pi_windup_stays_bounded() {
        let mut pi = PiController::new(1e-6, 0.05, 1e-3, (-1.0, 1.0), true).unwrap();
        let bound = (pi.u_max - pi.u_min) / pi.ki;
        for _ in 0..100_000 {
            pi.step(1e6, 0.0);
            assert!(pi.integrator.abs() <= bound);
        }
    }

    #[test]
    fn pi_without_anti_windup_winds_up() {
        let mut with = PiController::new(0.5, 1.0, 1e-3, (-1.0, 1.0), true).unwrap();
        let mut without = PiController::new(0.5, 1.0, 1e-3, (-1.0, 1.0), false).unwrap();
        for _ in 0..1000 {
            with.step(100.0, 0.0);
            without.step(100.0, 0.0);
        }
        assert!(without.integrator > with.integrator);
    }

    #[test]
    fn profile_values() {
        let stair = ReferenceProfile::default_staircase();
        assert_eq!(stair.value_at(0.0), 10.0);
        assert_eq!(stair.value_at(4.0), 20.0);
        assert_eq!(stair.value_at(14.9), 50.0);
        assert_eq!(stair.value_at(100.0), 50.0);

        let step = ReferenceProfile::default_repeated_step();
        assert_eq!(step.value_at(0.0), 0.0);
        assert_eq!(step.value_at(1.6), 30.0);
        assert_eq!(step.value_at(3.2), 0.0);
        assert_eq!(step.natural_duration_s(), Some(30.0));

        let sine = ReferenceProfile::default_rectified_sine();
        assert_eq!(sine.value_at(0.0), 0.0);
        assert!((sine.value_at(0.5) - 20.0).abs() < 1e-9);
        assert!(sine.value_at(1.0).abs() < 1e-9);
        assert!(sine.value_at(1.3) > 0.0);
        assert_eq!(sine.natural_duration_s(), None);
    }

    #[test]
    fn staircase_nondecreasing_until_final_dwell() {
        let stair = ReferenceProfile::default_staircase();
        let mut prev = 0.0;
        let mut t = 0.0;
        while t < 15.0 {
            let v = stair.value_at(t);
            assert!(v >= prev);
            prev = v;
            t += 0.01;
        }
    }

    #[test]
    fn profile_validation_errors() {
        assert!(ReferenceProfile::Staircase {
            levels: vec![],
            dwell_s: 1.0
        }
        .validate()
        .is_err());
        assert!(ReferenceProfile::RepeatedStep {
            amplitude_n: 30.0,
            trials: 0,
            period_s: 3.0
        }
        .validate()
        .is_err());
        assert!(ReferenceProfile::RectifiedSine {
            amplitude_n: 20.0,
            frequency_hz: 0.0
        }
        .validate()
        .is_err());
    }

    fn zero_poly_sensor() -> ForceSensor {
        ForceSensor {
            chain: SensingChain::reference(),
            adc: AdcConfig::default(),
            noise: NoiseModel::disabled(),
            poly: CalibrationPoly {
                coefficients: vec![0.0, 0.0, 0.0, 0.0],
                fit_range: (0.0, 3.3),
                residual_rmse: 0.0,
            },
        }
    }

    #[test]
    fn zero_profile_zero_rmse() {
        let profile = ReferenceProfile::Staircase {
            levels: vec![0.0],
            dwell_s: 2.0,
        };
        let mut plant = test_plant();
        let mut pi = PiController::reference();
        let sensor = zero_poly_sensor();
        let out = run_experiment(
            &profile,
            &mut plant,
            &mut pi,
            &sensor,
            &ExperimentConfig::default(),
        )
        .unwrap();
        assert!(out.abort.is_none());
        assert_eq!(out.trajectory.len(), 2000);
        assert_eq!(out.summary.rmse_n, Some(0.0));
        for p in &out.trajectory {
            assert_eq!(p.command, 0.0);
            assert_eq!(p.measured_n, 0.0);
        }
    }

    #[test]
    fn zero_duration_run_is_empty() {
        let profile = ReferenceProfile::default_rectified_sine();
        let mut plant = test_plant();
        let mut pi = PiController::reference();
        let sensor = zero_poly_sensor();
        let config = ExperimentConfig {
            duration_s: Some(0.0),
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&profile, &mut plant, &mut pi, &sensor, &config).unwrap();
        assert!(out.trajectory.is_empty());
        assert_eq!(out.summary.rmse_n, None);
    }

    #[test]
    fn sine_without_duration_is_an_error() {
        let profile = ReferenceProfile::default_rectified_sine();
        let mut plant = test_plant();
        let mut pi = PiController::reference();
        let sensor = zero_poly_sensor();
        let err = run_experiment(
            &profile,
            &mut plant,
            &mut pi,
            &sensor,
            &ExperimentConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ControlError::MissingDuration));
    }

    #[test]
    fn control_rate_capped_at_sensing_rate() {
        let profile = ReferenceProfile::default_staircase();
        let mut plant = test_plant();
        let mut pi = PiController::reference();
        let sensor = zero_poly_sensor();
        let config = ExperimentConfig {
            control_rate_hz: 6000.0,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            run_experiment(&profile, &mut plant, &mut pi, &sensor, &config),
            Err(ControlError::InvalidConfig { .. })
        ));
    }
}
