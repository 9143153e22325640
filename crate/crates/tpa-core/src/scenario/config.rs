//! Flat dotted-key configuration with unit-suffixed keys.
//!
//! A file is TOML restricted to scalar values (`fiber.diameter_nm = 350`;
//! `[fiber]` tables are flattened the same way). Every key has a default
//! taken from the selected built-in `scenario`, then file values apply, then
//! command-line overrides.

use crate::constants::{wavelength_span_to_omega, wavelength_to_omega, ELEMENTARY_CHARGE};
use crate::fiber::{CoreIndex, FiberSpec, NormalizationConvention};
use crate::tpa::{AtomicLadder, PairKind, PhotonPairSpec, ToroidSpec, VaporSpec, VelocityModel};
use serde::Serialize;
use serde_json::{json, Value as JsonValue};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("unknown built-in scenario `{0}` (expected table1-entangled-fiber, table1-mono-fiber or table1-toroid)")]
    UnknownScenario(String),
    #[error("override `{0}` is not of the form key=value")]
    MalformedOverride(String),
}

/// A scalar config value before it is bound to a key.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Number(f64),
    Text(String),
}

impl RawValue {
    /// Parse a command-line value: numbers stay numbers, anything else is text.
    pub fn parse_cli(text: &str) -> Self {
        let t = text.trim();
        match t.parse::<f64>() {
            Ok(x) => RawValue::Number(x),
            Err(_) => RawValue::Text(t.trim_matches('"').to_string()),
        }
    }

    fn from_toml(key: &str, v: &toml::Value) -> Result<Self, ConfigError> {
        match v {
            toml::Value::Float(x) => Ok(RawValue::Number(*x)),
            toml::Value::Integer(i) => Ok(RawValue::Number(*i as f64)),
            toml::Value::String(s) => Ok(RawValue::Text(s.clone())),
            other => Err(ConfigError::InvalidValue { key: key.into(), message: format!("unsupported value {other}") }),
        }
    }

    fn from_json(key: &str, v: &JsonValue) -> Result<Self, ConfigError> {
        match v {
            JsonValue::Number(n) => Ok(RawValue::Number(n.as_f64().unwrap_or(f64::NAN))),
            JsonValue::String(s) => Ok(RawValue::Text(s.clone())),
            JsonValue::Null => Ok(RawValue::Text(String::new())),
            other => Err(ConfigError::InvalidValue { key: key.into(), message: format!("unsupported value {other}") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Fiber,
    Toroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Detuning,
    Bandwidth,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Detuning => "detuning",
            SweepVariable::Bandwidth => "bandwidth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

pub const BUILTIN_SCENARIOS: [&str; 3] = ["table1-entangled-fiber", "table1-mono-fiber", "table1-toroid"];

/// Fully resolved configuration, stored in the units of its keys so the
/// parameter echo reproduces the inputs exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub geometry: Geometry,
    pub fiber_diameter_nm: f64,
    pub fiber_length_mm: f64,
    pub fiber_core_index: CoreIndex,
    pub fiber_normalization: NormalizationConvention,
    pub pair_kind: PairKind,
    pub pair_wavelength_nm: f64,
    pub pair_idler_wavelength_nm: f64,
    pub pair_detuning_nm: f64,
    pub pair_bandwidth_nm: f64,
    pub pair_velocity: VelocityModel,
    pub atom_dipole1_nm: f64,
    pub atom_dipole2_nm: f64,
    pub atom_gamma1_per_s: f64,
    pub atom_gamma2_per_s: f64,
    pub vapor_density_per_cm3: f64,
    pub toroid_principal_diameter_um: f64,
    pub toroid_minor_diameter_nm: f64,
    pub sweep_variable: SweepVariable,
    pub sweep_lo_nm: f64,
    pub sweep_hi_nm: f64,
    pub sweep_steps: usize,
    pub optimize_lo_nm: f64,
    pub optimize_hi_nm: f64,
    pub coincidence_max_separation_um: f64,
    pub coincidence_steps: usize,
    pub output_format: OutputFormat,
    pub output_path: String,
}

impl ScenarioConfig {
    /// Built-in benchmark scenario by name.
    pub fn builtin(name: &str) -> Result<Self, ConfigError> {
        let base = Self {
            scenario: name.to_string(),
            geometry: Geometry::Fiber,
            fiber_diameter_nm: 350.0,
            fiber_length_mm: 5.0,
            fiber_core_index: CoreIndex::Constant(1.4537),
            fiber_normalization: NormalizationConvention::ComplexAmplitude,
            pair_kind: PairKind::Entangled,
            pair_wavelength_nm: 778.0,
            pair_idler_wavelength_nm: 778.0,
            pair_detuning_nm: 2.1,
            pair_bandwidth_nm: 1.0,
            pair_velocity: VelocityModel::Group,
            atom_dipole1_nm: 0.223,
            atom_dipole2_nm: 0.0492,
            atom_gamma1_per_s: 1e9,
            atom_gamma2_per_s: 1e9,
            vapor_density_per_cm3: 1e12,
            toroid_principal_diameter_um: 19.0,
            toroid_minor_diameter_nm: 350.0,
            sweep_variable: SweepVariable::Bandwidth,
            sweep_lo_nm: 0.2,
            sweep_hi_nm: 6.0,
            sweep_steps: 30,
            optimize_lo_nm: 0.2,
            optimize_hi_nm: 6.0,
            coincidence_max_separation_um: 200.0,
            coincidence_steps: 41,
            output_format: OutputFormat::Json,
            output_path: String::new(),
        };
        match name {
            "table1-entangled-fiber" => Ok(base),
            "table1-mono-fiber" => Ok(Self { pair_kind: PairKind::Monochromatic, ..base }),
            "table1-toroid" => Ok(Self { geometry: Geometry::Toroid, pair_kind: PairKind::Monochromatic, ..base }),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }

    /// Build from flattened key/value pairs; the `scenario` key (if present)
    /// picks the base preset before the remaining keys apply.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (String, RawValue)>,
    {
        let pairs: Vec<(String, RawValue)> = pairs.into_iter().collect();
        let base = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "scenario")
            .map(|(_, v)| match v {
                RawValue::Text(s) => Ok(s.clone()),
                RawValue::Number(_) => Err(ConfigError::InvalidValue { key: "scenario".into(), message: "expected a name".into() }),
            })
            .transpose()?
            .unwrap_or_else(|| BUILTIN_SCENARIOS[0].to_string());
        let mut cfg = Self::builtin(&base)?;
        for (k, v) in &pairs {
            if k != "scenario" {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse config text (TOML scalars, dotted keys or tables).
    pub fn parse_text(text: &str, origin: &str) -> Result<Vec<(String, RawValue)>, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse { origin: origin.into(), message: e.message().to_string() })?;
        let mut out = Vec::new();
        flatten("", &table, &mut out)?;
        Ok(out)
    }

    pub fn read_file(path: &Path) -> Result<Vec<(String, RawValue)>, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse { origin: path.display().to_string(), message: e.to_string() })?;
        Self::parse_text(&text, &path.display().to_string())
    }

    /// Parse a `key=value` override.
    pub fn parse_override(text: &str) -> Result<(String, RawValue), ConfigError> {
        let (k, v) = text.split_once('=').ok_or_else(|| ConfigError::MalformedOverride(text.into()))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::MalformedOverride(text.into()));
        }
        Ok((k.to_string(), RawValue::parse_cli(v)))
    }

    /// Rebuild from an emitted `parameters` block.
    pub fn from_parameters(params: &BTreeMap<String, JsonValue>) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (k, v) in params {
            pairs.push((k.clone(), RawValue::from_json(k, v)?));
        }
        Self::from_pairs(pairs)
    }

    pub fn set(&mut self, key: &str, value: &RawValue) -> Result<(), ConfigError> {
        let num = || match value {
            RawValue::Number(x) => Ok(*x),
            RawValue::Text(s) => s
                .parse::<f64>()
                .map_err(|_| ConfigError::InvalidValue { key: key.into(), message: format!("expected a number, got `{s}`") }),
        };
        let text = || match value {
            RawValue::Text(s) => s.to_ascii_lowercase(),
            RawValue::Number(x) => x.to_string(),
        };
        let count = || -> Result<usize, ConfigError> {
            let x = num()?;
            if x >= 0.0 && x.fract() == 0.0 && x < 1e9 {
                Ok(x as usize)
            } else {
                Err(ConfigError::InvalidValue { key: key.into(), message: format!("expected a non-negative integer, got {x}") })
            }
        };
        let bad = |msg: &str| ConfigError::InvalidValue { key: key.into(), message: msg.into() };
        match key {
            "scenario" => self.scenario = text(),
            "geometry" => {
                self.geometry = match text().as_str() {
                    "fiber" => Geometry::Fiber,
                    "toroid" => Geometry::Toroid,
                    _ => return Err(bad("expected fiber or toroid")),
                }
            }
            "fiber.diameter_nm" => self.fiber_diameter_nm = num()?,
            "fiber.length_mm" => self.fiber_length_mm = num()?,
            "fiber.core_index" => {
                self.fiber_core_index = match value {
                    RawValue::Number(x) => CoreIndex::Constant(*x),
                    RawValue::Text(s) if s.eq_ignore_ascii_case("fused_silica") => CoreIndex::FusedSilica,
                    RawValue::Text(s) => CoreIndex::Constant(
                        s.parse().map_err(|_| bad("expected a number or fused_silica"))?,
                    ),
                }
            }
            "fiber.normalization" => {
                self.fiber_normalization = match text().as_str() {
                    "complex_amplitude" => NormalizationConvention::ComplexAmplitude,
                    "rms_amplitude" => NormalizationConvention::RmsAmplitude,
                    _ => return Err(bad("expected complex_amplitude or rms_amplitude")),
                }
            }
            "pair.kind" => {
                self.pair_kind = match text().as_str() {
                    "entangled" => PairKind::Entangled,
                    "monochromatic" => PairKind::Monochromatic,
                    _ => return Err(bad("expected entangled or monochromatic")),
                }
            }
            "pair.wavelength_nm" => self.pair_wavelength_nm = num()?,
            "pair.idler_wavelength_nm" => self.pair_idler_wavelength_nm = num()?,
            "pair.detuning_nm" => self.pair_detuning_nm = num()?,
            "pair.bandwidth_nm" => self.pair_bandwidth_nm = num()?,
            "pair.velocity" => {
                self.pair_velocity = match text().as_str() {
                    "group" => VelocityModel::Group,
                    "phase" => VelocityModel::Phase,
                    _ => return Err(bad("expected group or phase")),
                }
            }
            "atom.dipole1_nm" => self.atom_dipole1_nm = num()?,
            "atom.dipole2_nm" => self.atom_dipole2_nm = num()?,
            "atom.gamma1_per_s" => self.atom_gamma1_per_s = num()?,
            "atom.gamma2_per_s" => self.atom_gamma2_per_s = num()?,
            "vapor.density_per_cm3" => self.vapor_density_per_cm3 = num()?,
            "toroid.principal_diameter_um" => self.toroid_principal_diameter_um = num()?,
            "toroid.minor_diameter_nm" => self.toroid_minor_diameter_nm = num()?,
            "sweep.variable" => {
                self.sweep_variable = match text().as_str() {
                    "detuning" => SweepVariable::Detuning,
                    "bandwidth" => SweepVariable::Bandwidth,
                    _ => return Err(bad("expected detuning or bandwidth")),
                }
            }
            "sweep.lo_nm" => self.sweep_lo_nm = num()?,
            "sweep.hi_nm" => self.sweep_hi_nm = num()?,
            "sweep.steps" => self.sweep_steps = count()?,
            "optimize.lo_nm" => self.optimize_lo_nm = num()?,
            "optimize.hi_nm" => self.optimize_hi_nm = num()?,
            "coincidence.max_separation_um" => self.coincidence_max_separation_um = num()?,
            "coincidence.steps" => self.coincidence_steps = count()?,
            "output.format" => {
                self.output_format = OutputFormat::parse(&text()).ok_or_else(|| bad("expected csv or json"))?
            }
            "output.path" => {
                self.output_path = match value {
                    RawValue::Text(s) => s.clone(),
                    RawValue::Number(x) => x.to_string(),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("fiber.diameter_nm", self.fiber_diameter_nm),
            ("fiber.length_mm", self.fiber_length_mm),
            ("pair.wavelength_nm", self.pair_wavelength_nm),
            ("pair.idler_wavelength_nm", self.pair_idler_wavelength_nm),
            ("pair.bandwidth_nm", self.pair_bandwidth_nm),
            ("atom.dipole1_nm", self.atom_dipole1_nm),
            ("atom.dipole2_nm", self.atom_dipole2_nm),
            ("atom.gamma1_per_s", self.atom_gamma1_per_s),
            ("atom.gamma2_per_s", self.atom_gamma2_per_s),
            ("toroid.principal_diameter_um", self.toroid_principal_diameter_um),
            ("toroid.minor_diameter_nm", self.toroid_minor_diameter_nm),
            ("coincidence.max_separation_um", self.coincidence_max_separation_um),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::InvalidValue { key: key.into(), message: format!("must be positive, got {v}") });
            }
        }
        if !(self.vapor_density_per_cm3 >= 0.0 && self.vapor_density_per_cm3.is_finite()) {
            return Err(ConfigError::InvalidValue {
                key: "vapor.density_per_cm3".into(),
                message: format!("must be non-negative, got {}", self.vapor_density_per_cm3),
            });
        }
        if !self.pair_detuning_nm.is_finite() {
            return Err(ConfigError::InvalidValue { key: "pair.detuning_nm".into(), message: "must be finite".into() });
        }
        if let CoreIndex::Constant(n) = self.fiber_core_index {
            if !(n > 1.0 && n.is_finite()) {
                return Err(ConfigError::InvalidValue { key: "fiber.core_index".into(), message: format!("must exceed 1, got {n}") });
            }
        }
        let ratio = self.toroid_minor_diameter_nm * 1e-9 / (self.toroid_principal_diameter_um * 1e-6);
        if self.geometry == Geometry::Toroid && ratio >= 0.1 {
            return Err(ConfigError::InvalidValue {
                key: "toroid.minor_diameter_nm".into(),
                message: format!("aspect ratio d/D = {ratio} must stay below 0.1"),
            });
        }
        if !(self.sweep_lo_nm < self.sweep_hi_nm) {
            return Err(ConfigError::InvalidValue { key: "sweep.hi_nm".into(), message: "sweep.lo_nm must be below sweep.hi_nm".into() });
        }
        if self.sweep_variable == SweepVariable::Bandwidth && self.sweep_lo_nm <= 0.0 {
            return Err(ConfigError::InvalidValue { key: "sweep.lo_nm".into(), message: "bandwidth sweep must start above 0".into() });
        }
        if self.sweep_steps < 2 {
            return Err(ConfigError::InvalidValue { key: "sweep.steps".into(), message: "need at least 2 steps".into() });
        }
        if !(self.optimize_lo_nm > 0.0 && self.optimize_lo_nm < self.optimize_hi_nm) {
            return Err(ConfigError::InvalidValue { key: "optimize.lo_nm".into(), message: "need 0 < optimize.lo_nm < optimize.hi_nm".into() });
        }
        if self.coincidence_steps < 2 {
            return Err(ConfigError::InvalidValue { key: "coincidence.steps".into(), message: "need at least 2 steps".into() });
        }
        Ok(())
    }

    /// Resolved configuration as a sorted `parameters` block.
    pub fn parameters(&self) -> BTreeMap<String, JsonValue> {
        let core_index = match self.fiber_core_index {
            CoreIndex::Constant(n) => json!(n),
            CoreIndex::FusedSilica => json!("fused_silica"),
        };
        let entries = [
            ("scenario", json!(self.scenario)),
            ("geometry", json!(match self.geometry { Geometry::Fiber => "fiber", Geometry::Toroid => "toroid" })),
            ("fiber.diameter_nm", json!(self.fiber_diameter_nm)),
            ("fiber.length_mm", json!(self.fiber_length_mm)),
            ("fiber.core_index", core_index),
            ("fiber.normalization", serde_json::to_value(self.fiber_normalization).unwrap_or(JsonValue::Null)),
            ("pair.kind", serde_json::to_value(self.pair_kind).unwrap_or(JsonValue::Null)),
            ("pair.wavelength_nm", json!(self.pair_wavelength_nm)),
            ("pair.idler_wavelength_nm", json!(self.pair_idler_wavelength_nm)),
            ("pair.detuning_nm", json!(self.pair_detuning_nm)),
            ("pair.bandwidth_nm", json!(self.pair_bandwidth_nm)),
            ("pair.velocity", serde_json::to_value(self.pair_velocity).unwrap_or(JsonValue::Null)),
            ("atom.dipole1_nm", json!(self.atom_dipole1_nm)),
            ("atom.dipole2_nm", json!(self.atom_dipole2_nm)),
            ("atom.gamma1_per_s", json!(self.atom_gamma1_per_s)),
            ("atom.gamma2_per_s", json!(self.atom_gamma2_per_s)),
            ("vapor.density_per_cm3", json!(self.vapor_density_per_cm3)),
            ("toroid.principal_diameter_um", json!(self.toroid_principal_diameter_um)),
            ("toroid.minor_diameter_nm", json!(self.toroid_minor_diameter_nm)),
            ("sweep.variable", json!(self.sweep_variable.name())),
            ("sweep.lo_nm", json!(self.sweep_lo_nm)),
            ("sweep.hi_nm", json!(self.sweep_hi_nm)),
            ("sweep.steps", json!(self.sweep_steps)),
            ("optimize.lo_nm", json!(self.optimize_lo_nm)),
            ("optimize.hi_nm", json!(self.optimize_hi_nm)),
            ("coincidence.max_separation_um", json!(self.coincidence_max_separation_um)),
            ("coincidence.steps", json!(self.coincidence_steps)),
            ("output.format", json!(self.output_format.name())),
            ("output.path", json!(self.output_path)),
        ];
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn fiber_spec(&self) -> FiberSpec {
        FiberSpec {
            diameter: self.fiber_diameter_nm * 1e-9,
            length: self.fiber_length_mm * 1e-3,
            core_index: self.fiber_core_index,
            normalization: self.fiber_normalization,
        }
    }

    pub fn omega_signal(&self) -> f64 {
        wavelength_to_omega(self.pair_wavelength_nm * 1e-9)
    }

    pub fn omega_idler(&self) -> f64 {
        wavelength_to_omega(self.pair_idler_wavelength_nm * 1e-9)
    }

    /// Mean detuning Δ in rad/s.
    pub fn detuning(&self) -> f64 {
        wavelength_span_to_omega(self.pair_detuning_nm * 1e-9, self.pair_wavelength_nm * 1e-9)
    }

    /// Bandwidth σ in rad/s.
    pub fn sigma(&self) -> f64 {
        wavelength_span_to_omega(self.pair_bandwidth_nm * 1e-9, self.pair_wavelength_nm * 1e-9)
    }

    pub fn atom(&self) -> AtomicLadder {
        AtomicLadder::resonant_with(
            self.omega_signal(),
            self.omega_idler(),
            self.detuning(),
            self.atom_dipole1_nm * 1e-9 * ELEMENTARY_CHARGE,
            self.atom_dipole2_nm * 1e-9 * ELEMENTARY_CHARGE,
            self.atom_gamma1_per_s,
            self.atom_gamma2_per_s,
        )
    }

    pub fn pair(&self) -> PhotonPairSpec {
        PhotonPairSpec {
            omega_s0: self.omega_signal(),
            omega_i0: self.omega_idler(),
            sigma: self.sigma(),
            kind: self.pair_kind,
            velocity: self.pair_velocity,
        }
    }

    pub fn vapor(&self) -> VaporSpec {
        VaporSpec { density: self.vapor_density_per_cm3 * 1e6 }
    }

    pub fn toroid(&self) -> ToroidSpec {
        ToroidSpec {
            principal_diameter: self.toroid_principal_diameter_um * 1e-6,
            minor_diameter: self.toroid_minor_diameter_nm * 1e-9,
        }
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, RawValue)>) -> Result<(), ConfigError> {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out)?,
            other => {
                let raw = RawValue::from_toml(&key, other)?;
                out.push((key, raw));
            }
        }
    }
    Ok(())
}
