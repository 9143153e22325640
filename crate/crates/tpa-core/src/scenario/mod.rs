//! Scenario layer behind the `tpa` binary: resolved configurations,
//! built-in benchmarks, sweeps, bandwidth optimization and CSV/JSON output.

mod config;
mod output;

pub use config::{
    ConfigError, Geometry, OutputFormat, RawValue, ScenarioConfig, SweepVariable, BUILTIN_SCENARIOS,
};
pub use output::{config_hash, emit, render, CsvRow, Payload, CSV_HEADER};

use crate::fiber::{exterior_energy_fraction, normalize_mode, single_mode_check, FiberSpec};
use crate::numerics::maximize_scalar;
use crate::tpa::{
    coincidence_profile, pair_separation, AtomicLadder, PairKind, PhotonPairSpec, TpaEngine, TpaError, TpaReport,
};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::PathBuf;
use thiserror::Error;

/// Pre-scan resolution used before bandwidth maximization.
pub const PRESCAN_POINTS: usize = 32;
const OPTIMIZE_TOL_NM: f64 = 1e-6;
const UNIMODAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}")]
    Computation { context: String, source: TpaError },
    #[error("sweep point {variable} = {x} nm failed")]
    SweepPoint { variable: &'static str, x: f64, source: TpaError },
    #[error("rate curve is not unimodal over the bracket: pre-scan found {maxima} local maxima")]
    NotUnimodal { maxima: usize },
    #[error("nothing to emit: result has no rows")]
    EmptyResult,
    #[error("{0}")]
    Unsupported(String),
    #[error("cannot write {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl ScenarioError {
    /// Process exit status for this error: 2 config, 3 computation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Unsupported(_) => 2,
            ScenarioError::Io { .. } => 4,
            _ => 3,
        }
    }
}

fn computation(context: &str) -> impl FnOnce(TpaError) -> ScenarioError + '_ {
    move |source| ScenarioError::Computation { context: context.to_string(), source }
}

/// Engine, atom and pair for a configuration. Toroid scenarios use the
/// ring stand-in fiber and always a monochromatic pair.
pub fn prepare(cfg: &ScenarioConfig) -> Result<(TpaEngine, AtomicLadder, PhotonPairSpec), ScenarioError> {
    let atom = cfg.atom();
    let mut pair = cfg.pair();
    let fiber = match cfg.geometry {
        Geometry::Fiber => cfg.fiber_spec(),
        Geometry::Toroid => {
            let toroid = cfg.toroid();
            toroid.validate().map_err(computation("toroid"))?;
            pair.kind = PairKind::Monochromatic;
            toroid.ring_fiber(&cfg.fiber_spec())
        }
    };
    let engine = TpaEngine::for_pair(&fiber, &pair).map_err(computation("mode solution"))?;
    Ok((engine, atom, pair))
}

fn evaluate(engine: &TpaEngine, cfg: &ScenarioConfig) -> Result<TpaReport, TpaError> {
    let mut pair = cfg.pair();
    if cfg.geometry == Geometry::Toroid {
        pair.kind = PairKind::Monochromatic;
    }
    engine.total_rate(&cfg.atom(), &pair, &cfg.vapor())
}

/// Rate report for one configuration.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TpaReport, ScenarioError> {
    cfg.validate()?;
    let (engine, _, _) = prepare(cfg)?;
    evaluate(&engine, cfg).map_err(computation("rate"))
}

fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, ScenarioError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ScenarioError::Pool(e.to_string()))?;
    Ok(pool.install(work))
}

fn with_variable(cfg: &ScenarioConfig, variable: SweepVariable, x_nm: f64) -> ScenarioConfig {
    let mut c = cfg.clone();
    match variable {
        SweepVariable::Detuning => c.pair_detuning_nm = x_nm,
        SweepVariable::Bandwidth => c.pair_bandwidth_nm = x_nm,
    }
    c
}

fn rates_at(
    engine: &TpaEngine,
    cfg: &ScenarioConfig,
    variable: SweepVariable,
    xs: &[f64],
    jobs: Option<usize>,
) -> Result<Vec<SweepRow>, ScenarioError> {
    let results: Vec<Result<TpaReport, TpaError>> =
        with_pool(jobs, || xs.par_iter().map(|&x| evaluate(engine, &with_variable(cfg, variable, x))).collect())?;
    xs.iter()
        .zip(results)
        .map(|(&x, r)| {
            r.map(|report| SweepRow { x, report })
                .map_err(|source| ScenarioError::SweepPoint { variable: variable.name(), x, source })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Swept value in nm.
    pub x: f64,
    pub report: TpaReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub unit: &'static str,
    pub rows: Vec<SweepRow>,
}

/// Rate at `sweep.steps` evenly spaced values of the swept variable.
pub fn sweep(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<SweepResult, ScenarioError> {
    cfg.validate()?;
    let (engine, _, _) = prepare(cfg)?;
    let n = cfg.sweep_steps;
    let xs: Vec<f64> = (0..n)
        .map(|i| cfg.sweep_lo_nm + (cfg.sweep_hi_nm - cfg.sweep_lo_nm) * i as f64 / (n - 1) as f64)
        .collect();
    let rows = rates_at(&engine, cfg, cfg.sweep_variable, &xs, jobs)?;
    Ok(SweepResult { variable: cfg.sweep_variable, unit: "nm", rows })
}

/// Local maxima of a sampled curve, ignoring changes below `tol`.
pub fn count_local_maxima(values: &[f64], tol: f64) -> usize {
    let mut maxima = 0;
    let mut rising = true;
    let mut anchor = match values.first() {
        Some(&v) => v,
        None => return 0,
    };
    for &v in &values[1..] {
        if v > anchor + tol {
            rising = true;
            anchor = v;
        } else if v < anchor - tol {
            if rising {
                maxima += 1;
            }
            rising = false;
            anchor = v;
        } else if rising {
            anchor = anchor.max(v);
        } else {
            anchor = anchor.min(v);
        }
    }
    if rising {
        maxima += 1;
    }
    maxima
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthOptimum {
    pub sigma_nm: f64,
    pub sigma_rad_per_s: f64,
    pub rate: f64,
    pub report: TpaReport,
    /// `(σ in nm, R₂)` pre-scan samples.
    pub prescan: Vec<(f64, f64)>,
}

/// Bandwidth maximizing the entangled rate over `[optimize.lo_nm,
/// optimize.hi_nm]`: a 32-point pre-scan checks unimodality and brackets
/// the peak, then Brent's method refines it.
pub fn optimize_bandwidth(cfg: &ScenarioConfig, jobs: Option<usize>) -> Result<BandwidthOptimum, ScenarioError> {
    cfg.validate()?;
    if cfg.pair_kind != PairKind::Entangled || cfg.geometry != Geometry::Fiber {
        return Err(ScenarioError::Unsupported("bandwidth optimization needs an entangled pair in a fiber".into()));
    }
    let (engine, _, _) = prepare(cfg)?;
    let (lo, hi) = (cfg.optimize_lo_nm, cfg.optimize_hi_nm);
    let xs: Vec<f64> = (0..PRESCAN_POINTS).map(|i| lo + (hi - lo) * i as f64 / (PRESCAN_POINTS - 1) as f64).collect();
    let rows = rates_at(&engine, cfg, SweepVariable::Bandwidth, &xs, jobs)?;
    let rates: Vec<f64> = rows.iter().map(|r| r.report.rate).collect();
    let peak = rates.iter().cloned().fold(0.0, f64::max);
    let maxima = count_local_maxima(&rates, UNIMODAL_TOL * peak);
    if maxima > 1 {
        return Err(ScenarioError::NotUnimodal { maxima });
    }
    let best = rates.iter().enumerate().fold(0, |b, (i, &r)| if r > rates[b] { i } else { b });
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let mut failure = None;
    let objective = |x: f64| match evaluate(&engine, &with_variable(cfg, SweepVariable::Bandwidth, x)) {
        Ok(r) => r.rate,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (x_star, _) = maximize_scalar(objective, a, b, OPTIMIZE_TOL_NM)
        .map_err(|e| ScenarioError::Computation { context: "bandwidth maximization".into(), source: e.into() })?;
    if let Some(e) = failure {
        return Err(ScenarioError::Computation { context: "bandwidth maximization".into(), source: e });
    }
    let best_cfg = with_variable(cfg, SweepVariable::Bandwidth, x_star);
    let report = evaluate(&engine, &best_cfg).map_err(computation("rate at optimum"))?;
    Ok(BandwidthOptimum {
        sigma_nm: x_star,
        sigma_rad_per_s: best_cfg.sigma(),
        rate: report.rate,
        report,
        prescan: xs.into_iter().zip(rates).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub scenario: String,
    pub report: TpaReport,
}

/// The three built-in benchmarks, each with `overrides` applied.
pub fn table1(overrides: &[(String, RawValue)]) -> Result<Vec<Table1Row>, ScenarioError> {
    BUILTIN_SCENARIOS
        .iter()
        .map(|name| {
            let mut pairs = vec![("scenario".to_string(), RawValue::Text(name.to_string()))];
            pairs.extend(overrides.iter().filter(|(k, _)| k != "scenario").cloned());
            let cfg = ScenarioConfig::from_pairs(pairs)?;
            Ok(Table1Row { scenario: name.to_string(), report: run_scenario(&cfg)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceRow {
    /// Longitudinal separation z₁ − z₂ (m).
    pub z: f64,
    pub profile: f64,
    /// Entangled rate weighted by the coincidence profile (s⁻¹).
    pub weighted_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub separation: f64,
    pub velocity: f64,
    pub sigma: f64,
    pub rate: f64,
    pub rows: Vec<CoincidenceRow>,
}

/// Pair-separation profile `e^{−σ²Δz²/u²}` sampled over
/// `[0, coincidence.max_separation_um]`.
pub fn coincidence(cfg: &ScenarioConfig) -> Result<CoincidenceReport, ScenarioError> {
    cfg.validate()?;
    if cfg.geometry != Geometry::Fiber {
        return Err(ScenarioError::Unsupported("coincidence analysis needs the fiber geometry".into()));
    }
    let mut ent = cfg.clone();
    ent.pair_kind = PairKind::Entangled;
    let (engine, _, _) = prepare(&ent)?;
    let report = evaluate(&engine, &ent).map_err(computation("rate"))?;
    let (u, sigma) = (engine.velocity(), ent.sigma());
    let n = cfg.coincidence_steps;
    let zmax = cfg.coincidence_max_separation_um * 1e-6;
    let rows = (0..n)
        .map(|i| {
            let z = zmax * i as f64 / (n - 1) as f64;
            let profile = coincidence_profile(z, u, sigma);
            CoincidenceRow { z, profile, weighted_rate: report.rate * profile }
        })
        .collect();
    Ok(CoincidenceReport { separation: pair_separation(u, sigma), velocity: u, sigma, rate: report.rate, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub r: f64,
    /// `|E|` (V/m) along the polarization axis.
    pub along: f64,
    /// `|E|` (V/m) perpendicular to it.
    pub across: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub fiber: FiberSpec,
    pub omega: f64,
    pub beta: f64,
    pub effective_index: f64,
    pub group_velocity: f64,
    pub phase_velocity: f64,
    pub v_parameter: f64,
    pub single_mode: bool,
    pub exterior_energy_fraction: f64,
    pub norm_factor: f64,
    pub radial_profile: Vec<FieldSample>,
}

/// Dispersion and field summary of the signal mode.
pub fn mode_report(cfg: &ScenarioConfig) -> Result<ModeReport, ScenarioError> {
    cfg.validate()?;
    let fiber = match cfg.geometry {
        Geometry::Fiber => cfg.fiber_spec(),
        Geometry::Toroid => cfg.toroid().ring_fiber(&cfg.fiber_spec()),
    };
    let omega = cfg.omega_signal();
    let mode = normalize_mode(&fiber, omega).map_err(|e| computation("mode solution")(e.into()))?;
    let frac = exterior_energy_fraction(&fiber, omega).map_err(|e| computation("energy fraction")(e.into()))?;
    let a = fiber.radius();
    let radial_profile = (0..=60)
        .map(|i| {
            let r = 4.0 * a * i as f64 / 60.0;
            FieldSample { r, along: mode.field_magnitude(r, 0.0), across: mode.field_magnitude(r, 0.5 * PI) }
        })
        .collect();
    let c = crate::constants::SPEED_OF_LIGHT;
    Ok(ModeReport {
        fiber,
        omega,
        beta: mode.beta(),
        effective_index: mode.beta() * c / omega,
        group_velocity: mode.group_velocity,
        phase_velocity: omega / mode.beta(),
        v_parameter: fiber.v_parameter(omega),
        single_mode: single_mode_check(&fiber, omega),
        exterior_energy_fraction: frac,
        norm_factor: mode.norm_factor,
        radial_profile,
    })
}

/// Subcommand names accepted by [`execute`].
pub const COMMANDS: [&str; 6] = ["mode", "rate", "sweep", "optimize", "table1", "coincidence"];

/// Resolve `pairs` (file keys, then overrides, later pairs winning) and run
/// one command.
pub fn execute(
    command: &str,
    pairs: Vec<(String, RawValue)>,
    jobs: Option<usize>,
) -> Result<(ScenarioConfig, Payload), ScenarioError> {
    let cfg = ScenarioConfig::from_pairs(pairs.clone())?;
    let payload = match command {
        "mode" => Payload::Mode(mode_report(&cfg)?),
        "rate" => Payload::Rate(run_scenario(&cfg)?),
        "sweep" => Payload::Sweep(sweep(&cfg, jobs)?),
        "optimize" => Payload::Optimum(optimize_bandwidth(&cfg, jobs)?),
        "table1" => Payload::Table1(table1(&pairs)?),
        "coincidence" => Payload::Coincidence(coincidence(&cfg)?),
        other => {
            return Err(ScenarioError::Unsupported(format!(
                "unknown command `{other}` (expected one of {})",
                COMMANDS.join(", ")
            )))
        }
    };
    Ok((cfg, payload))
}
