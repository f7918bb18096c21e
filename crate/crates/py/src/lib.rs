//! Python bindings: configs, single runs, paired comparisons, and the
//! radio-model helpers.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use wsnsim_core as core;
use wsnsim_core::{energy, experiment, metrics, monch};

fn to_py_err(e: core::SimError) -> PyErr {
    match e {
        core::SimError::Config(_) | core::SimError::Csv { .. } => {
            PyValueError::new_err(e.to_string())
        }
        core::SimError::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config_err(e: core::ConfigFileError) -> PyErr {
    match e {
        core::ConfigFileError::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Simulation parameters. Every keyword defaults to the reference setup.
#[pyclass(name = "SimConfig", module = "wsnsim")]
struct PySimConfig {
    inner: core::SimConfig,
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (
        *, node_count=None, yard_length=None, yard_width=None, bs_x=None, bs_y=None,
        initial_energy=None, protocol=None, ch_probability=None, frames_per_round=None,
        max_rounds=None, seed=None, pt=None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        node_count: Option<usize>,
        yard_length: Option<f64>,
        yard_width: Option<f64>,
        bs_x: Option<f64>,
        bs_y: Option<f64>,
        initial_energy: Option<f64>,
        protocol: Option<&str>,
        ch_probability: Option<f64>,
        frames_per_round: Option<u32>,
        max_rounds: Option<u32>,
        seed: Option<u64>,
        pt: Option<f64>,
    ) -> PyResult<Self> {
        let mut c = core::SimConfig::default();
        if let Some(v) = node_count {
            c.node_count = v;
        }
        if let Some(v) = yard_length {
            c.field.yard_length = v;
        }
        if let Some(v) = yard_width {
            c.field.yard_width = v;
        }
        if let Some(v) = bs_x {
            c.field.bs_position.x = v;
        }
        if let Some(v) = bs_y {
            c.field.bs_position.y = v;
        }
        if let Some(v) = initial_energy {
            c.initial_energy = v;
        }
        if let Some(v) = protocol {
            c.protocol = v
                .parse()
                .map_err(|e: core::ConfigError| PyValueError::new_err(e.to_string()))?;
        }
        if let Some(v) = ch_probability {
            c.ch_probability = v;
        }
        if let Some(v) = frames_per_round {
            c.frames_per_round = v;
        }
        if let Some(v) = max_rounds {
            c.max_rounds = v;
        }
        if let Some(v) = seed {
            c.seed = v;
        }
        if let Some(v) = pt {
            c.pt = v;
        }
        let inner = core::validate_config(c).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = core::parse_config(text).map_err(config_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = core::load_config(&path).map_err(config_err)?;
        Ok(Self { inner })
    }

    fn to_toml(&self) -> String {
        core::config_to_string(&self.inner)
    }

    /// Copy with the given protocol and/or seed.
    #[pyo3(signature = (*, protocol=None, seed=None))]
    fn replace(&self, protocol: Option<&str>, seed: Option<u64>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        if let Some(p) = protocol {
            inner.protocol = p
                .parse()
                .map_err(|e: core::ConfigError| PyValueError::new_err(e.to_string()))?;
        }
        if let Some(s) = seed {
            inner.seed = s;
        }
        Ok(Self { inner })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count
    }

    #[getter]
    fn protocol(&self) -> &'static str {
        self.inner.protocol.name()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn max_rounds(&self) -> u32 {
        self.inner.max_rounds
    }

    #[getter]
    fn initial_energy(&self) -> f64 {
        self.inner.initial_energy
    }

    #[getter]
    fn bs_position(&self) -> (f64, f64) {
        let p = self.inner.field.bs_position;
        (p.x, p.y)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SimConfig(node_count={}, protocol='{}', seed={}, max_rounds={}, initial_energy={})",
            c.node_count,
            c.protocol.name(),
            c.seed,
            c.max_rounds,
            c.initial_energy
        )
    }
}

#[pyclass(name = "RoundMetrics", module = "wsnsim", frozen)]
struct PyRoundMetrics {
    #[pyo3(get)]
    round: u32,
    #[pyo3(get)]
    alive_count: usize,
    #[pyo3(get)]
    total_residual_energy: f64,
    #[pyo3(get)]
    cumulative_packets_to_bs: u64,
    #[pyo3(get)]
    head_count: usize,
}

impl From<&metrics::RoundMetrics> for PyRoundMetrics {
    fn from(m: &metrics::RoundMetrics) -> Self {
        Self {
            round: m.round,
            alive_count: m.alive_count,
            total_residual_energy: m.total_residual_energy,
            cumulative_packets_to_bs: m.cumulative_packets_to_bs,
            head_count: m.head_count,
        }
    }
}

#[pymethods]
impl PyRoundMetrics {
    fn __repr__(&self) -> String {
        format!(
            "RoundMetrics(round={}, alive_count={}, total_residual_energy={}, cumulative_packets_to_bs={}, head_count={})",
            self.round, self.alive_count, self.total_residual_energy, self.cumulative_packets_to_bs, self.head_count
        )
    }
}

#[pyclass(name = "Summary", module = "wsnsim", frozen)]
struct PySummary {
    #[pyo3(get)]
    first_node_death_round: Option<u32>,
    #[pyo3(get)]
    half_nodes_death_round: Option<u32>,
    #[pyo3(get)]
    last_node_death_round: Option<u32>,
    #[pyo3(get)]
    total_packets_to_bs: u64,
    #[pyo3(get)]
    rounds_executed: u32,
}

impl From<metrics::Summary> for PySummary {
    fn from(s: metrics::Summary) -> Self {
        Self {
            first_node_death_round: s.first_node_death_round,
            half_nodes_death_round: s.half_nodes_death_round,
            last_node_death_round: s.last_node_death_round,
            total_packets_to_bs: s.total_packets_to_bs,
            rounds_executed: s.rounds_executed,
        }
    }
}

fn py_opt(v: Option<u32>) -> String {
    v.map_or_else(|| "None".into(), |r| r.to_string())
}

#[pymethods]
impl PySummary {
    fn __repr__(&self) -> String {
        format!(
            "Summary(first_node_death_round={}, half_nodes_death_round={}, last_node_death_round={}, total_packets_to_bs={}, rounds_executed={})",
            py_opt(self.first_node_death_round),
            py_opt(self.half_nodes_death_round),
            py_opt(self.last_node_death_round),
            self.total_packets_to_bs,
            self.rounds_executed
        )
    }
}

/// Per-round trace and summary of one run.
#[pyclass(name = "SimulationResult", module = "wsnsim", frozen)]
struct PySimulationResult {
    inner: core::SimulationResult,
}

#[pymethods]
impl PySimulationResult {
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn protocol(&self) -> &'static str {
        self.inner.config_echo.protocol.name()
    }

    #[getter]
    fn summary(&self) -> PySummary {
        self.inner.summary.into()
    }

    #[getter]
    fn per_round(&self) -> Vec<PyRoundMetrics> {
        self.inner
            .per_round
            .iter()
            .map(PyRoundMetrics::from)
            .collect()
    }

    /// Alive count per round, as a plain list.
    fn alive_series(&self) -> Vec<usize> {
        self.inner.per_round.iter().map(|m| m.alive_count).collect()
    }

    fn to_csv(&self) -> String {
        metrics::csv_string(&self.inner)
    }

    fn summary_json(&self) -> String {
        metrics::summary_json(&self.inner)
    }

    /// Writes `rounds.csv`, `summary.json` and the three charts into `out_dir`.
    fn export(&self, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| PyOSError::new_err(format!("{}: {e}", out_dir.display())))?;
        let csv = out_dir.join("rounds.csv");
        let json = out_dir.join("summary.json");
        metrics::export_csv(&self.inner, &csv).map_err(to_py_err)?;
        metrics::export_summary_json(&self.inner, &json).map_err(to_py_err)?;
        let label = self.inner.config_echo.protocol.name().to_uppercase();
        let mut written = vec![csv, json];
        written.extend(
            metrics::render_plots(std::slice::from_ref(&self.inner), &[label], &out_dir)
                .map_err(to_py_err)?,
        );
        Ok(written)
    }

    fn __len__(&self) -> usize {
        self.inner.per_round.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "SimulationResult(protocol='{}', seed={}, rounds={})",
            self.protocol(),
            self.inner.seed,
            self.inner.per_round.len()
        )
    }
}

/// LEACH and MONCH run from one shared deployment.
#[pyclass(name = "PairedRun", module = "wsnsim", frozen)]
struct PyPairedRun {
    inner: core::PairedRun,
}

#[pymethods]
impl PyPairedRun {
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn leach(&self) -> PySimulationResult {
        PySimulationResult {
            inner: self.inner.leach.clone(),
        }
    }

    #[getter]
    fn monch(&self) -> PySimulationResult {
        PySimulationResult {
            inner: self.inner.monch.clone(),
        }
    }

    /// Node positions as `(x, y)` tuples in id order.
    #[getter]
    fn deployment(&self) -> Vec<(f64, f64)> {
        self.inner.deployment.iter().map(|p| (p.x, p.y)).collect()
    }

    /// Cumulative packets at the last round both runs reached, `(leach, monch)`.
    fn packets_at_common_round(&self) -> (u64, u64) {
        self.inner.packets_at_common_round()
    }
}

#[pyfunction]
fn run_simulation(config: PyRef<'_, PySimConfig>) -> PyResult<PySimulationResult> {
    let inner = core::run_simulation(&config.inner).map_err(to_py_err)?;
    Ok(PySimulationResult { inner })
}

#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_pair(config: PyRef<'_, PySimConfig>, seed: Option<u64>) -> PyResult<PyPairedRun> {
    let seed = seed.unwrap_or(config.inner.seed);
    let inner = core::run_pair(&config.inner, seed).map_err(to_py_err)?;
    Ok(PyPairedRun { inner })
}

/// Paired runs over `seeds` consecutive seeds plus the comparison CSV
/// (with a `median` row when more than one seed ran).
#[pyfunction]
#[pyo3(signature = (config, seeds=1, first_seed=None))]
fn compare(
    py: Python<'_>,
    config: PyRef<'_, PySimConfig>,
    seeds: usize,
    first_seed: Option<u64>,
) -> PyResult<(Vec<PyPairedRun>, String)> {
    if seeds == 0 {
        return Err(PyValueError::new_err("seeds must be at least 1"));
    }
    let cfg = config.inner.clone();
    let base = first_seed.unwrap_or(cfg.seed);
    let pairs = py
        .detach(|| {
            experiment::sweep_seeds(base, seeds)
                .into_iter()
                .map(|s| core::run_pair(&cfg, s))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(to_py_err)?;
    let table = experiment::comparison_csv(&experiment::comparison_rows(&pairs));
    Ok((
        pairs
            .into_iter()
            .map(|inner| PyPairedRun { inner })
            .collect(),
        table,
    ))
}

fn radio_of(config: Option<PyRef<'_, PySimConfig>>) -> core::RadioParams {
    config.map(|c| c.inner.radio).unwrap_or_default()
}

#[pyfunction]
#[pyo3(signature = (config=None))]
fn distance_threshold(config: Option<PyRef<'_, PySimConfig>>) -> f64 {
    energy::distance_threshold(&radio_of(config))
}

#[pyfunction]
#[pyo3(signature = (bits, distance, config=None))]
fn tx_energy(bits: u64, distance: f64, config: Option<PyRef<'_, PySimConfig>>) -> PyResult<f64> {
    if !(distance >= 0.0 && distance.is_finite()) {
        return Err(PyValueError::new_err(
            "distance must be finite and nonnegative",
        ));
    }
    Ok(energy::tx_energy(&radio_of(config), bits, distance))
}

#[pyfunction]
#[pyo3(signature = (bits, config=None))]
fn rx_energy(bits: u64, config: Option<PyRef<'_, PySimConfig>>) -> f64 {
    energy::rx_energy(&radio_of(config), bits)
}

#[pyfunction]
#[pyo3(signature = (bits, config=None))]
fn aggregation_energy(bits: u64, config: Option<PyRef<'_, PySimConfig>>) -> f64 {
    energy::aggregation_energy(&radio_of(config), bits)
}

/// Head count for `alive` nodes under `config`'s field, radio and `pt`.
#[pyfunction]
#[pyo3(signature = (config, alive=None))]
fn optimal_head_count(config: PyRef<'_, PySimConfig>, alive: Option<usize>) -> usize {
    let c = &config.inner;
    monch::optimal_head_count(&c.radio, &c.field, alive.unwrap_or(c.node_count), c.pt)
}

#[pyfunction]
fn cluster_capacity(alive: usize, kopt: usize) -> PyResult<usize> {
    if kopt == 0 {
        return Err(PyValueError::new_err("kopt must be at least 1"));
    }
    Ok(monch::cluster_capacity(alive, kopt))
}

/// Lifetime summary of a per-round CSV as written by `SimulationResult.to_csv`.
#[pyfunction]
fn summarize_csv(text: &str, node_count: usize) -> PyResult<PySummary> {
    let series = metrics::parse_csv(text).map_err(to_py_err)?;
    Ok(metrics::summarize_series(&series, node_count).into())
}

#[pymodule]
pub fn wsnsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add_class::<PyRoundMetrics>()?;
    m.add_class::<PySummary>()?;
    m.add_class::<PySimulationResult>()?;
    m.add_class::<PyPairedRun>()?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_function(wrap_pyfunction!(run_pair, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(distance_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(tx_energy, m)?)?;
    m.add_function(wrap_pyfunction!(rx_energy, m)?)?;
    m.add_function(wrap_pyfunction!(aggregation_energy, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_head_count, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(summarize_csv, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
