//! Key-value model configuration shared by all subcommands.
//!
//! Plain-text `key = value` lines, `#` comments, SI units throughout (meters,
//! pascals, volts, seconds). Every run starts from the built-in reference
//! values and overlays the file, so a config file only needs the keys it
//! changes. The fully resolved set (defaults included) is echoed into each
//! output header for reproducibility.

use std::fmt::Write as _;
use std::path::Path;

use optotension_core::adc::AdcConfig;
use optotension_core::control::{PiController, TsaPlant};
use optotension_core::elastomer::{
    axial_stiffness, ElastomerGeometry, Material, SectionProperties,
};
use optotension_core::noise::NoiseModel;
use optotension_core::optics::{PhotoReflectorModel, SensingChain};

use crate::CliError;

/// Controller gains and limits (the loop period comes from the run rate).
#[derive(Debug, Clone, Copy)]
pub struct ControllerParams {
    pub kp: f64,
    pub ki: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub anti_windup: bool,
}

/// Actuator constants; the series stiffness is derived from the geometry.
#[derive(Debug, Clone, Copy)]
pub struct PlantParams {
    pub string_length: f64,
    pub string_radius: f64,
    pub motor_time_constant: f64,
    pub max_speed: f64,
    pub slack_offset: f64,
}

/// The resolved model: geometry, material, optics, acquisition, and control.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub geometry: ElastomerGeometry,
    pub material: Material,
    /// Overrides for the rectangular section defaults, if any.
    pub section_overrides: [Option<f64>; 4],
    pub reflector: PhotoReflectorModel,
    pub sigma_v: f64,
    pub adc: AdcConfig,
    pub plant: PlantParams,
    pub controller: ControllerParams,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            geometry: ElastomerGeometry::reference(),
            material: Material::al7075_t6(),
            section_overrides: [None; 4],
            reflector: PhotoReflectorModel::reference(),
            sigma_v: NoiseModel::default().sigma_v,
            adc: AdcConfig::default(),
            plant: PlantParams {
                string_length: 0.1,
                string_radius: 0.75e-3,
                motor_time_constant: 0.02,
                max_speed: 500.0,
                slack_offset: 0.0,
            },
            controller: ControllerParams {
                kp: 3.0e-3,
                ki: 2.0e-2,
                u_min: -1.0,
                u_max: 1.0,
                anti_windup: true,
            },
        }
    }
}

impl ModelConfig {
    /// Defaults overlaid with the entries of `path`, if given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut config = Self::default();
        let Some(path) = path else {
            return Ok(config);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            config
                .set(key.trim(), value.trim())
                .map_err(|msg| {
                    CliError::usage(format!("{}:{}: {msg}", path.display(), lineno + 1))
                })?;
        }
        config.validate()?;
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(value: &str) -> Result<f64, String> {
            value
                .parse::<f64>()
                .map_err(|_| format!("not a number: {value}"))
        }
        match key {
            "elastomer.l1" => self.geometry.l1 = num(value)?,
            "elastomer.l2" => self.geometry.l2 = num(value)?,
            "elastomer.l3" => self.geometry.l3 = num(value)?,
            "elastomer.l4" => self.geometry.l4 = num(value)?,
            "elastomer.t1" => self.geometry.t1 = num(value)?,
            "elastomer.t2" => self.geometry.t2 = num(value)?,
            "elastomer.t3" => self.geometry.t3 = num(value)?,
            "elastomer.a1" => self.geometry.a1 = num(value)?,
            "elastomer.a2" => self.geometry.a2 = num(value)?,
            "elastomer.b1" => self.geometry.b1 = num(value)?,
            "material.elastic_modulus" => self.material.elastic_modulus = num(value)?,
            "material.shear_modulus" => self.material.shear_modulus = num(value)?,
            "material.shear_coefficient" => self.material.shear_coefficient = num(value)?,
            "section.i1" => self.section_overrides[0] = Some(num(value)?),
            "section.i2" => self.section_overrides[1] = Some(num(value)?),
            "section.a5" => self.section_overrides[2] = Some(num(value)?),
            "section.a6" => self.section_overrides[3] = Some(num(value)?),
            "optics.v_peak" => self.reflector.v_peak = num(value)?,
            "optics.d_peak" => self.reflector.d_peak = num(value)?,
            "optics.rest_gap" => self.reflector.rest_gap = num(value)?,
            "optics.window_min" => self.reflector.window_min = num(value)?,
            "optics.window_max" => self.reflector.window_max = num(value)?,
            "optics.gap_sign" => self.reflector.gap_sign = num(value)?,
            "optics.temp_coeff" => self.reflector.temp_coeff = num(value)?,
            "optics.t_ref" => self.reflector.t_ref = num(value)?,
            "noise.sigma_v" => self.sigma_v = num(value)?,
            "adc.bits" => {
                self.adc.bits = value
                    .parse::<u32>()
                    .map_err(|_| format!("not an integer: {value}"))?
            }
            "adc.v_ref" => self.adc.v_ref = num(value)?,
            "plant.string_length" => self.plant.string_length = num(value)?,
            "plant.string_radius" => self.plant.string_radius = num(value)?,
            "plant.motor_time_constant" => self.plant.motor_time_constant = num(value)?,
            "plant.max_speed" => self.plant.max_speed = num(value)?,
            "plant.slack_offset" => self.plant.slack_offset = num(value)?,
            "controller.kp" => self.controller.kp = num(value)?,
            "controller.ki" => self.controller.ki = num(value)?,
            "controller.u_min" => self.controller.u_min = num(value)?,
            "controller.u_max" => self.controller.u_max = num(value)?,
            "controller.anti_windup" => {
                self.controller.anti_windup = value
                    .parse::<bool>()
                    .map_err(|_| format!("not a boolean: {value}"))?
            }
            other => return Err(format!("unknown configuration key: {other}")),
        }
        Ok(())
    }

    /// Re-runs the domain validations after a raw overlay.
    fn validate(&self) -> Result<(), CliError> {
        let g = &self.geometry;
        ElastomerGeometry::new(g.l1, g.l2, g.l3, g.l4, g.t1, g.t2, g.t3, g.a1, g.b1)
            .and_then(|geom| geom.with_second_lever_arm(g.a2))
            .map_err(CliError::domain_display)?;
        Material::new(
            self.material.elastic_modulus,
            self.material.shear_modulus,
            self.material.shear_coefficient,
        )
        .map_err(CliError::domain_display)?;
        let r = &self.reflector;
        PhotoReflectorModel::new(
            r.v_peak,
            r.d_peak,
            r.rest_gap,
            r.window_min,
            r.window_max,
            r.gap_sign,
            r.temp_coeff,
            r.t_ref,
        )
        .map_err(CliError::domain_display)?;
        NoiseModel::new(self.sigma_v, 0).map_err(CliError::domain_display)?;
        AdcConfig::new(self.adc.bits, self.adc.v_ref).map_err(CliError::domain_display)?;
        self.section_properties().map_err(CliError::domain_display)?;
        Ok(())
    }

    /// Rectangular defaults with any per-field overrides applied.
    pub fn section_properties(
        &self,
    ) -> Result<SectionProperties, optotension_core::elastomer::ElastomerError> {
        let rect = SectionProperties::rectangular(&self.geometry);
        SectionProperties::new(
            self.section_overrides[0].unwrap_or(rect.i1),
            self.section_overrides[1].unwrap_or(rect.i2),
            self.section_overrides[2].unwrap_or(rect.a5),
            self.section_overrides[3].unwrap_or(rect.a6),
        )
    }

    pub fn sensing_chain(&self) -> Result<SensingChain, CliError> {
        Ok(SensingChain {
            geometry: self.geometry,
            section: self.section_properties().map_err(CliError::domain_display)?,
            material: self.material,
            reflector: self.reflector,
        })
    }

    pub fn noise(&self, seed: u64) -> Result<NoiseModel, CliError> {
        NoiseModel::new(self.sigma_v, seed).map_err(CliError::domain_display)
    }

    /// Series stiffness of the sensor spring, derived from the geometry.
    pub fn stiffness(&self) -> Result<f64, CliError> {
        let sec = self.section_properties().map_err(CliError::domain_display)?;
        axial_stiffness(&self.geometry, &sec, &self.material).map_err(CliError::domain_display)
    }

    pub fn tsa_plant(&self) -> Result<TsaPlant, CliError> {
        TsaPlant::new(
            self.plant.string_length,
            self.plant.string_radius,
            self.plant.motor_time_constant,
            self.plant.max_speed,
            self.stiffness()?,
            self.plant.slack_offset,
        )
        .map_err(CliError::domain_display)
    }

    pub fn pi_controller(&self, dt_s: f64) -> Result<PiController, CliError> {
        PiController::new(
            self.controller.kp,
            self.controller.ki,
            dt_s,
            (self.controller.u_min, self.controller.u_max),
            self.controller.anti_windup,
        )
        .map_err(CliError::domain_display)
    }

    /// The fully resolved configuration as `key = value` lines.
    pub fn echo_entries(&self) -> Vec<(String, String)> {
        let g = &self.geometry;
        let m = &self.material;
        let r = &self.reflector;
        let p = &self.plant;
        let c = &self.controller;
        let sec = SectionProperties::rectangular(g);
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("elastomer.l1", g.l1.to_string());
        push("elastomer.l2", g.l2.to_string());
        push("elastomer.l3", g.l3.to_string());
        push("elastomer.l4", g.l4.to_string());
        push("elastomer.t1", g.t1.to_string());
        push("elastomer.t2", g.t2.to_string());
        push("elastomer.t3", g.t3.to_string());
        push("elastomer.a1", g.a1.to_string());
        push("elastomer.a2", g.a2.to_string());
        push("elastomer.b1", g.b1.to_string());
        push("material.elastic_modulus", m.elastic_modulus.to_string());
        push("material.shear_modulus", m.shear_modulus.to_string());
        push("material.shear_coefficient", m.shear_coefficient.to_string());
        push(
            "section.i1",
            self.section_overrides[0].unwrap_or(sec.i1).to_string(),
        );
        push(
            "section.i2",
            self.section_overrides[1].unwrap_or(sec.i2).to_string(),
        );
        push(
            "section.a5",
            self.section_overrides[2].unwrap_or(sec.a5).to_string(),
        );
        push(
            "section.a6",
            self.section_overrides[3].unwrap_or(sec.a6).to_string(),
        );
        push("optics.v_peak", r.v_peak.to_string());
        push("optics.d_peak", r.d_peak.to_string());
        push("optics.rest_gap", r.rest_gap.to_string());
        push("optics.window_min", r.window_min.to_string());
        push("optics.window_max", r.window_max.to_string());
        push("optics.gap_sign", r.gap_sign.to_string());
        push("optics.temp_coeff", r.temp_coeff.to_string());
        push("optics.t_ref", r.t_ref.to_string());
        push("noise.sigma_v", self.sigma_v.to_string());
        push("adc.bits", self.adc.bits.to_string());
        push("adc.v_ref", self.adc.v_ref.to_string());
        push("plant.string_length", p.string_length.to_string());
        push("plant.string_radius", p.string_radius.to_string());
        push("plant.motor_time_constant", p.motor_time_constant.to_string());
        push("plant.max_speed", p.max_speed.to_string());
        push("plant.slack_offset", p.slack_offset.to_string());
        push("controller.kp", c.kp.to_string());
        push("controller.ki", c.ki.to_string());
        push("controller.u_min", c.u_min.to_string());
        push("controller.u_max", c.u_max.to_string());
        push("controller.anti_windup", c.anti_windup.to_string());
        out
    }

}

/// Renders echo entries plus run-specific entries as `# key = value` lines.
pub fn render_header(
    config: &ModelConfig,
    run_entries: &[(String, String)],
) -> String {
    let mut out = String::new();
    for (k, v) in run_entries {
        let _ = writeln!(out, "# {k} = {v}");
    }
    for (k, v) in config.echo_entries() {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}
