//! Python bindings: configuration, a slot-level simulator handle, cell runs and ranking.

use std::path::PathBuf;

use mec_offload::env::{exchange, EiEnv};
use mec_offload::evalcli::{cli::train_cell, compute_metrics, friedman_from_scores, report::report as write_report};
use mec_offload::orchestrator::{run_cell as run_one, Cell, ExperimentConfig, Scheme, Setup};
use mec_offload::workload::{channel_gain as gain, link_rate as rate, Channel, Task};
use mec_offload::{Error, Stream};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Usage(_) | Error::Domain(_) | Error::Dimension { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(to_py)
}

/// Experiment configuration. Defaults match the simulator's built-in settings.
#[pyclass(name = "Config", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: ExperimentConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    fn new() -> Self {
        Self {
            inner: ExperimentConfig::default(),
        }
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        ExperimentConfig::from_toml(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn episodes(&self) -> usize {
        self.inner.run.episodes
    }

    #[setter]
    fn set_episodes(&mut self, n: usize) {
        self.inner.run.episodes = n;
    }

    #[getter]
    fn slots(&self) -> usize {
        self.inner.run.slots
    }

    #[setter]
    fn set_slots(&mut self, n: usize) {
        self.inner.run.slots = n;
    }

    #[getter]
    fn eval_episodes(&self) -> usize {
        self.inner.run.eval_episodes
    }

    #[setter]
    fn set_eval_episodes(&mut self, n: usize) {
        self.inner.run.eval_episodes = n;
    }

    #[getter]
    fn stations(&self) -> usize {
        self.inner.topology.stations
    }

    #[setter]
    fn set_stations(&mut self, n: usize) {
        self.inner.topology.stations = n;
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(stations={}, episodes={}, slots={})",
            self.inner.topology.stations, self.inner.run.episodes, self.inner.run.slots
        )
    }
}

fn config_or_default(cfg: Option<&PyConfig>) -> ExperimentConfig {
    cfg.map(|c| c.inner.clone()).unwrap_or_default()
}

/// One cell's infrastructure and environments, driven slot by slot from Python.
#[pyclass(name = "Simulator")]
struct PySimulator {
    setup: Setup,
    ei: EiEnv,
    seed: u64,
    tasks: Vec<Task>,
}

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (config = None, cp_md = 0.6, seed = 0))]
    fn new(config: Option<&PyConfig>, cp_md: f64, seed: u64) -> PyResult<Self> {
        let setup = Setup::new(&config_or_default(config), cp_md, seed).map_err(to_py)?;
        let ei = setup.ei_env();
        let tasks = setup.episode_tasks(seed, Stream::Workload, 0);
        Ok(Self { setup, ei, seed, tasks })
    }

    #[getter]
    fn station_count(&self) -> usize {
        self.setup.infra.station_count()
    }

    #[getter]
    fn access_station(&self) -> usize {
        self.setup.infra.access_station()
    }

    /// Load the task sequence of a training episode.
    fn reset(&mut self, episode: usize) -> usize {
        self.tasks = self.setup.episode_tasks(self.seed, Stream::Workload, episode);
        self.tasks.len()
    }

    /// Chain length of every task in the loaded episode.
    fn chain_lengths(&self) -> Vec<usize> {
        self.tasks.iter().map(|t| t.chain.len()).collect()
    }

    /// Run slot `slot` with offloading ratio `x`, placing stage `i` on `hosts[i]`.
    #[pyo3(signature = (slot, x, hosts = Vec::new()))]
    fn step<'py>(&mut self, py: Python<'py>, slot: usize, x: f64, hosts: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
        let task = self
            .tasks
            .get(slot)
            .ok_or_else(|| PyValueError::new_err(format!("slot {slot} outside episode of {}", self.tasks.len())))?;
        if x > 0.0 && hosts.len() != task.chain.len() {
            return Err(PyValueError::new_err(format!(
                "task has {} VNFs but {} hosts were given",
                task.chain.len(),
                hosts.len()
            )));
        }
        let n = self.setup.infra.station_count();
        if let Some(&h) = hosts.iter().find(|&&h| h >= n) {
            return Err(PyValueError::new_err(format!("host {h} outside 0..{n}")));
        }
        let mut stage = 0;
        let out = exchange(&self.setup.md_env, &mut self.ei, task, x, |_, _| {
            stage += 1;
            hosts[stage - 1]
        })
        .map_err(to_py)?;
        let r = &out.result;
        let d = PyDict::new(py);
        d.set_item("local_delay", r.local_delay)?;
        d.set_item("edge_delay", r.edge_delay)?;
        d.set_item("execution_delay", r.execution_delay)?;
        d.set_item("local_energy", r.local_energy)?;
        d.set_item("edge_energy", r.edge_energy)?;
        d.set_item("md_energy", r.md_energy)?;
        d.set_item("usage_charge", r.usage_charge)?;
        d.set_item("cost", r.cost)?;
        d.set_item("feasible", r.feasibility.all())?;
        d.set_item("md_reward", out.md_reward)?;
        Ok(d)
    }
}

/// Names of every scheme.
#[pyfunction]
fn schemes() -> Vec<&'static str> {
    Scheme::ALL.iter().map(|s| s.name()).collect()
}

/// Channel gain at `distance` metres under the default channel.
#[pyfunction]
fn channel_gain(distance: f64) -> PyResult<f64> {
    gain(distance, &Channel::default()).map_err(to_py)
}

/// Shannon rate in bit/s for a transmit power (W) and gain under the default channel.
#[pyfunction]
fn link_rate(power: f64, channel_gain: f64) -> f64 {
    rate(power, channel_gain, &Channel::default())
}

/// Train and evaluate one cell in memory; returns rewards and evaluation metrics.
#[pyfunction]
#[pyo3(signature = (scheme_name, cp_md = 0.6, seed = 0, config = None))]
fn run_cell<'py>(
    py: Python<'py>,
    scheme_name: &str,
    cp_md: f64,
    seed: u64,
    config: Option<&PyConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_or_default(config);
    let cell = Cell {
        scheme: scheme(scheme_name)?,
        cp_md,
        seed,
    };
    let (log, _) = py.detach(|| run_one(&cfg, cell, None)).map_err(to_py)?;
    let summary = mec_offload::evalcli::CellSummaryInput {
        scheme: cell.scheme.to_string(),
        cp_md,
        seed,
        training_rewards: log.training.iter().map(|e| e.cumulative_reward()).collect(),
        eval_rewards: log.evaluation.iter().map(|e| e.cumulative_reward()).collect(),
        eval_slots: log
            .evaluation
            .iter()
            .flat_map(|e| &e.slots)
            .map(|s| [s.execution_delay, s.md_energy, s.usage_charge, s.cost])
            .collect(),
    };
    let d = PyDict::new(py);
    d.set_item("training_rewards", summary.training_rewards.clone())?;
    d.set_item("eval_rewards", summary.eval_rewards.clone())?;
    if let Some(row) = compute_metrics(std::slice::from_ref(&summary)).rows.first() {
        d.set_item("aed", row.aed)?;
        d.set_item("aec", row.aec)?;
        d.set_item("auc", row.auc)?;
        d.set_item("mean_cost", row.mean_cost)?;
        d.set_item("avg_episodic_reward", row.avg_episodic_reward)?;
    }
    Ok(d)
}

/// Train one cell and write its run directory under `out`; returns the directory.
#[pyfunction]
#[pyo3(signature = (scheme_name, out, cp_md = 0.6, seed = 0, config = None))]
fn train(py: Python<'_>, scheme_name: &str, out: PathBuf, cp_md: f64, seed: u64, config: Option<&PyConfig>) -> PyResult<PathBuf> {
    let cfg = config_or_default(config);
    let cell = Cell {
        scheme: scheme(scheme_name)?,
        cp_md,
        seed,
    };
    py.detach(|| train_cell(&cfg, cell, &out)).map_err(to_py)
}

/// Metrics, ranks and plot series for the runs under `runs`, written to `out`.
#[pyfunction]
fn report(runs: PathBuf, out: PathBuf) -> PyResult<usize> {
    write_report(&runs, &out).map(|t| t.rows.len()).map_err(to_py)
}

/// Friedman average ranks. `scenarios` holds one lower-is-better score per scheme
/// for every scenario. Returns `(scheme, average_rank, position)` by position.
#[pyfunction]
fn friedman(metric: &str, scheme_names: Vec<String>, scenarios: Vec<Vec<f64>>) -> PyResult<Vec<(String, f64, usize)>> {
    let t = friedman_from_scores(metric, &scheme_names, &scenarios).map_err(to_py)?;
    Ok(t.entries.into_iter().map(|e| (e.scheme, e.average_rank, e.position)).collect())
}

#[pymodule]
#[pyo3(name = "mec_offload")]
fn mec_offload_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PySimulator>()?;
    m.add_function(wrap_pyfunction!(schemes, m)?)?;
    m.add_function(wrap_pyfunction!(channel_gain, m)?)?;
    m.add_function(wrap_pyfunction!(link_rate, m)?)?;
    m.add_function(wrap_pyfunction!(run_cell, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(friedman, m)?)?;
    Ok(())
}
