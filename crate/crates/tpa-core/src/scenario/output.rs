//! CSV and JSON rendering of command results.

use super::{
    BandwidthOptimum, CoincidenceReport, ModeReport, ScenarioConfig, ScenarioError, SweepResult, Table1Row,
};
use crate::tpa::TpaReport;
use serde_json::{json, Value as JsonValue};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str = "x_value,x_unit,rate_per_s,enhancement_factor,separation_s_m";

/// Result of one command, ready for rendering.
#[derive(Debug, Clone)]
pub enum Payload {
    Rate(TpaReport),
    Sweep(SweepResult),
    Optimum(BandwidthOptimum),
    Table1(Vec<Table1Row>),
    Coincidence(CoincidenceReport),
    Mode(ModeReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub unit: String,
    pub rate: f64,
    pub enhancement: Option<f64>,
    pub separation: Option<f64>,
}

impl CsvRow {
    fn from_report(x: f64, unit: &str, r: &TpaReport) -> Self {
        Self { x, unit: unit.to_string(), rate: r.rate, enhancement: r.enhancement_factor, separation: r.separation }
    }

    fn line(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        format!("{},{},{},{},{}", num(self.x), self.unit, num(self.rate), opt(self.enhancement), opt(self.separation))
    }
}

/// 17 significant digits, exponent form; enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Payload {
    pub fn command(&self) -> &'static str {
        match self {
            Payload::Rate(_) => "rate",
            Payload::Sweep(_) => "sweep",
            Payload::Optimum(_) => "optimize",
            Payload::Table1(_) => "table1",
            Payload::Coincidence(_) => "coincidence",
            Payload::Mode(_) => "mode",
        }
    }

    pub fn csv_rows(&self, cfg: &ScenarioConfig) -> Result<Vec<CsvRow>, ScenarioError> {
        let rows = match self {
            Payload::Rate(r) => vec![CsvRow::from_report(cfg.pair_detuning_nm, "nm", r)],
            Payload::Sweep(s) => s.rows.iter().map(|row| CsvRow::from_report(row.x, s.unit, &row.report)).collect(),
            Payload::Optimum(o) => vec![CsvRow::from_report(o.sigma_nm, "nm", &o.report)],
            Payload::Table1(rows) => {
                rows.iter().enumerate().map(|(i, row)| CsvRow::from_report(i as f64, &row.scenario, &row.report)).collect()
            }
            Payload::Coincidence(c) => c
                .rows
                .iter()
                .map(|row| CsvRow {
                    x: row.z,
                    unit: "m".into(),
                    rate: row.weighted_rate,
                    enhancement: None,
                    separation: Some(c.separation),
                })
                .collect(),
            Payload::Mode(_) => {
                return Err(ScenarioError::Unsupported("mode output is JSON only; use --format json".into()))
            }
        };
        if rows.is_empty() {
            return Err(ScenarioError::EmptyResult);
        }
        Ok(rows)
    }

    fn result_json(&self) -> Result<JsonValue, serde_json::Error> {
        match self {
            Payload::Rate(r) => serde_json::to_value(r),
            Payload::Sweep(s) => serde_json::to_value(s),
            Payload::Optimum(o) => serde_json::to_value(o),
            Payload::Table1(t) => serde_json::to_value(t),
            Payload::Coincidence(c) => serde_json::to_value(c),
            Payload::Mode(m) => serde_json::to_value(m),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Payload::Sweep(s) => s.rows.is_empty(),
            Payload::Table1(t) => t.is_empty(),
            Payload::Coincidence(c) => c.rows.is_empty(),
            _ => false,
        }
    }
}

/// sha256 over the command name and the canonical parameter echo.
pub fn config_hash(command: &str, cfg: &ScenarioConfig) -> String {
    let params = serde_json::to_string(&cfg.parameters()).expect("parameters serialize");
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0u8]);
    h.update(params.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Full output document for `payload` in the configured format.
pub fn render(cfg: &ScenarioConfig, payload: &Payload) -> Result<String, ScenarioError> {
    let command = payload.command();
    let hash = config_hash(command, cfg);
    match cfg.output_format {
        super::OutputFormat::Csv => {
            let rows = payload.csv_rows(cfg)?;
            let mut out = format!("# command: {command}\n# config_hash: {hash}\n");
            for (k, v) in cfg.parameters() {
                out.push_str(&format!("# {k} = {v}\n"));
            }
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&row.line());
                out.push('\n');
            }
            Ok(out)
        }
        super::OutputFormat::Json => {
            if payload.is_empty() {
                return Err(ScenarioError::EmptyResult);
            }
            let result = payload.result_json().map_err(|e| ScenarioError::Unsupported(e.to_string()))?;
            let doc = json!({
                "command": command,
                "config_hash": hash,
                "parameters": cfg.parameters(),
                "result": result,
            });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| ScenarioError::Unsupported(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Write to `path`, or stdout when it is empty.
pub fn emit(text: &str, path: &str) -> Result<(), ScenarioError> {
    if path.is_empty() {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .map_err(|source| ScenarioError::Io { path: "<stdout>".into(), source });
    }
    std::fs::write(Path::new(path), text).map_err(|source| ScenarioError::Io { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [1.8501234567890123e6, 0.0, -3.25e-12, 53.708] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn hash_depends_on_command_and_parameters() {
        let cfg = ScenarioConfig::builtin("table1-entangled-fiber").unwrap();
        let mut other = cfg.clone();
        other.fiber_length_mm = 6.0;
        assert_eq!(config_hash("rate", &cfg).len(), 64);
        assert_eq!(config_hash("rate", &cfg), config_hash("rate", &cfg.clone()));
        assert_ne!(config_hash("rate", &cfg), config_hash("sweep", &cfg));
        assert_ne!(config_hash("rate", &cfg), config_hash("rate", &other));
    }
}
