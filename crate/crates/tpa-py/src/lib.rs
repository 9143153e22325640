//! Python bindings: `import tpa`.
//!
//! Scenario commands return the same document the CLI writes as JSON
//! (`command`, `config_hash`, `parameters`, `result`) as a Python dict.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use tpa_core::constants::wavelength_to_omega;
use tpa_core::fiber::{solve_propagation_constant, FiberSpec};
use tpa_core::numerics::{erfi_complex, faddeeva_w as w};
use tpa_core::scenario::{execute, render, OutputFormat, RawValue, ScenarioError, BUILTIN_SCENARIOS};
use tpa_core::Complex64;

create_exception!(tpa, ConfigError, PyValueError, "Invalid scenario configuration.");
create_exception!(tpa, ComputationError, PyRuntimeError, "A rate or mode computation failed.");

fn to_py_err(e: ScenarioError) -> PyErr {
    match e.exit_code() {
        2 => ConfigError::new_err(error_chain(&e)),
        _ => ComputationError::new_err(error_chain(&e)),
    }
}

/// `outer: inner: ...` message of an error and its sources.
fn error_chain(e: &ScenarioError) -> String {
    let mut text = e.to_string();
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        text.push_str(": ");
        text.push_str(&s.to_string());
        source = s.source();
    }
    text
}

/// Config overrides from a `{key: value}` dict; numbers stay numbers.
pub fn override_pairs(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<(String, RawValue)>> {
    let mut pairs = Vec::new();
    if let Some(d) = overrides {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let value = if let Ok(x) = v.extract::<f64>() {
                RawValue::Number(x)
            } else if let Ok(s) = v.extract::<String>() {
                RawValue::Text(s)
            } else {
                return Err(ConfigError::new_err(format!("value for `{key}` must be a number or a string")));
            };
            pairs.push((key, value));
        }
    }
    Ok(pairs)
}

/// Run a scenario command (`mode`, `rate`, `sweep`, `optimize`, `table1`,
/// `coincidence`) and return the result document.
#[pyfunction]
#[pyo3(signature = (command, overrides=None, jobs=None))]
fn run<'py>(
    py: Python<'py>,
    command: &str,
    overrides: Option<&Bound<'py, PyDict>>,
    jobs: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let pairs = override_pairs(overrides)?;
    let command = command.to_string();
    let text = py
        .detach(move || {
            let (mut cfg, payload) = execute(&command, pairs, jobs)?;
            cfg.output_format = OutputFormat::Json;
            render(&cfg, &payload)
        })
        .map_err(to_py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Names of the built-in benchmark scenarios.
#[pyfunction]
fn builtin_scenarios() -> Vec<&'static str> {
    BUILTIN_SCENARIOS.to_vec()
}

/// Imaginary error function of a complex argument.
#[pyfunction]
fn erfi(z: Complex64) -> PyResult<Complex64> {
    erfi_complex(z).map_err(|e| ComputationError::new_err(e.to_string()))
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
#[pyfunction]
fn faddeeva_w(z: Complex64) -> Complex64 {
    w(z)
}

/// HE11 propagation constant (1/m) for a fiber of `diameter` (m) at vacuum
/// `wavelength` (m).
#[pyfunction]
#[pyo3(signature = (diameter, wavelength, core_index=1.4537))]
fn propagation_constant(diameter: f64, wavelength: f64, core_index: f64) -> PyResult<f64> {
    let fiber = FiberSpec::new(diameter, 1.0, core_index).map_err(|e| ConfigError::new_err(e.to_string()))?;
    solve_propagation_constant(&fiber, wavelength_to_omega(wavelength))
        .map_err(|e| ComputationError::new_err(e.to_string()))
}

#[pymodule]
fn tpa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(erfi, m)?)?;
    m.add_function(wrap_pyfunction!(faddeeva_w, m)?)?;
    m.add_function(wrap_pyfunction!(propagation_constant, m)?)?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add("ComputationError", m.py().get_type::<ComputationError>())?;
    Ok(())
}
