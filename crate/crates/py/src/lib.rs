//! Python bindings. Structured results cross the boundary as plain dicts.

// Signatures mirror Python keyword arguments.
#![allow(clippy::too_many_arguments)]

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use rig_lab::coupling::{coupon_collector_trial, run_coupling_trial};
use rig_lab::experiment::output::summary_json;
use rig_lab::experiment::{emit_outputs, ExperimentConfig};
use rig_lab::properties::{self, AuditParams, ConnectivityMode};
use rig_lab::threshold::{self, StatsReport, Variant};
use rig_lab::{generators, Error, FeatureProbabilities, Seed};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Round-trips through JSON so results arrive as dicts and lists.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn profile(m: Option<usize>, p: Option<f64>, probabilities: Option<Vec<f64>>) -> PyResult<FeatureProbabilities> {
    match (probabilities, m, p) {
        (Some(v), None, None) => FeatureProbabilities::new(v).map_err(py_err),
        (None, Some(m), Some(p)) => FeatureProbabilities::homogeneous(m, p).map_err(py_err),
        _ => Err(PyValueError::new_err("pass either `probabilities` or both `m` and `p`")),
    }
}

fn mode(name: &str) -> PyResult<ConnectivityMode> {
    match name {
        "vertex" => Ok(ConnectivityMode::Vertex),
        "edge" => Ok(ConnectivityMode::Edge),
        other => Err(PyValueError::new_err(format!("mode must be 'vertex' or 'edge', got {other:?}"))),
    }
}

/// Undirected simple graph on vertices `0..n`.
#[pyclass(name = "SimpleGraph", module = "rig_lab", skip_from_py_object)]
#[derive(Clone)]
struct PySimpleGraph {
    inner: rig_lab::SimpleGraph,
}

#[pymethods]
impl PySimpleGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PySimpleGraph { inner: rig_lab::SimpleGraph::new(n, edges).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(PySimpleGraph { inner: rig_lab::SimpleGraph::parse_edge_list(text).map_err(py_err)? })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.inner.has_edge(u, v)
    }

    fn union(&self, other: &PySimpleGraph) -> PyResult<Self> {
        Ok(PySimpleGraph { inner: self.inner.union(&other.inner).map_err(py_err)? })
    }

    fn is_subgraph_of(&self, other: &PySimpleGraph) -> PyResult<bool> {
        self.inner.is_subgraph_of(&other.inner).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.vertex_count()
    }

    fn __repr__(&self) -> String {
        format!("SimpleGraph(n={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// Samples G(n, m, p) and returns its projection.
#[pyfunction]
#[pyo3(signature = (n, m = None, p = None, probabilities = None, seed = 0))]
fn sample_rig(
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    seed: u64,
) -> PyResult<PySimpleGraph> {
    let probs = profile(m, p, probabilities)?;
    let rig = generators::sample_rig(n, &probs, Seed::new(seed)).map_err(py_err)?;
    Ok(PySimpleGraph { inner: rig.project() })
}

/// Feature sets of a G(n, m, p) sample.
#[pyfunction]
#[pyo3(signature = (n, m = None, p = None, probabilities = None, seed = 0))]
fn sample_feature_sets(
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    seed: u64,
) -> PyResult<Vec<Vec<usize>>> {
    let probs = profile(m, p, probabilities)?;
    Ok(generators::sample_rig(n, &probs, Seed::new(seed)).map_err(py_err)?.feature_sets().to_vec())
}

/// S1, S2, S3, S1t, a_n and the coupling parameters.
#[pyfunction]
#[pyo3(signature = (n, m = None, p = None, probabilities = None, t_max = None, omega = None, variant = "linear"))]
fn summary_stats<'py>(
    py: Python<'py>,
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    t_max: Option<usize>,
    omega: Option<f64>,
    variant: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let probs = profile(m, p, probabilities)?;
    let stats = threshold::summary_stats(n, &probs, t_max.unwrap_or(n.min(12))).map_err(py_err)?;
    let variant = match variant {
        "linear" => Variant::Linear,
        "exponential" => Variant::Exponential,
        other => return Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    };
    let omega = omega.unwrap_or_else(|| threshold::default_omega(n));
    let params = threshold::coupling_parameters(&stats, omega, variant).map_err(py_err)?;
    to_py(py, &StatsReport::new(&stats, &params))
}

/// `exp(-exp(-c))`.
#[pyfunction]
fn limit_probability(c: f64) -> PyResult<f64> {
    threshold::limit_probability(c).map_err(py_err)
}

#[pyfunction]
fn min_degree(g: &PySimpleGraph) -> usize {
    properties::min_degree(&g.inner)
}

#[pyfunction]
fn is_connected(g: &PySimpleGraph) -> bool {
    properties::is_connected(&g.inner)
}

#[pyfunction]
#[pyo3(signature = (g, k, mode = "vertex"))]
fn is_k_connected(g: &PySimpleGraph, k: usize, mode: &str) -> PyResult<bool> {
    properties::is_k_connected(&g.inner, k, self::mode(mode)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, mode = "vertex"))]
fn connectivity(g: &PySimpleGraph, mode: &str) -> PyResult<usize> {
    Ok(properties::connectivity(&g.inner, self::mode(mode)?))
}

#[pyfunction]
fn has_perfect_matching(g: &PySimpleGraph) -> bool {
    properties::has_perfect_matching(&g.inner)
}

/// Mate of each vertex, or `None` when unmatched.
#[pyfunction]
fn maximum_matching(g: &PySimpleGraph) -> Vec<Option<usize>> {
    properties::maximum_matching(&g.inner)
}

/// Dict with `verdict` ("yes", "no", "unknown"), `certificate` and `effort`.
#[pyfunction]
#[pyo3(signature = (g, budget = 10_000_000, seed = 0))]
fn hamiltonicity<'py>(py: Python<'py>, g: &PySimpleGraph, budget: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let v = properties::hamiltonicity_seeded(&g.inner, budget, Seed::new(seed)).map_err(py_err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (g, gamma = 0.6, k = 1, low_degree = None, samples_per_class = 200, seed = 0))]
fn structure_audit<'py>(
    py: Python<'py>,
    g: &PySimpleGraph,
    gamma: f64,
    k: usize,
    low_degree: Option<usize>,
    samples_per_class: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let params = AuditParams { gamma, k, low_degree: low_degree.unwrap_or(4 * k + 15), samples_per_class };
    let report = properties::structure_audit(&g.inner, &params, Seed::new(seed)).map_err(py_err)?;
    to_py(py, &report)
}

/// One run of the coupling chain below G(n, m, p).
#[pyfunction]
#[pyo3(signature = (n, m = None, p = None, probabilities = None, omega = None, seed = 0, trial = 0))]
fn coupling_trial<'py>(
    py: Python<'py>,
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    omega: Option<f64>,
    seed: u64,
    trial: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let probs = profile(m, p, probabilities)?;
    let omega = omega.unwrap_or_else(|| threshold::default_omega(n));
    let r = run_coupling_trial(n, &probs, omega, Seed::new(seed).with_trial(trial)).map_err(py_err)?;
    to_py(py, &r)
}

/// One run of the coupon-collector coupling.
#[pyfunction]
#[pyo3(signature = (n, m = None, p = None, probabilities = None, omega = None, seed = 0, trial = 0))]
fn collector_trial<'py>(
    py: Python<'py>,
    n: usize,
    m: Option<usize>,
    p: Option<f64>,
    probabilities: Option<Vec<f64>>,
    omega: Option<f64>,
    seed: u64,
    trial: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let probs = profile(m, p, probabilities)?;
    let omega = omega.unwrap_or_else(|| threshold::default_omega(n));
    let r = coupon_collector_trial(n, &probs, omega, Seed::new(seed).with_trial(trial)).map_err(py_err)?;
    to_py(py, &r)
}

/// Runs a sweep from a JSON config string and returns the summary document.
/// With `out`, the result files are written there as well.
#[pyfunction]
#[pyo3(signature = (config, out = None, threads = None))]
fn run_sweep<'py>(
    py: Python<'py>,
    config: &str,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_json(config).map_err(py_err)?;
    let result = py.detach(|| rig_lab::experiment::run_sweep(&cfg, threads)).map_err(py_err)?;
    if let Some(dir) = out {
        emit_outputs(&result, &dir).map_err(py_err)?;
    }
    json_to_py(py, &summary_json(&result))
}

#[pymodule]
#[pyo3(name = "rig_lab")]
fn rig_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimpleGraph>()?;
    m.add_function(wrap_pyfunction!(sample_rig, m)?)?;
    m.add_function(wrap_pyfunction!(sample_feature_sets, m)?)?;
    m.add_function(wrap_pyfunction!(summary_stats, m)?)?;
    m.add_function(wrap_pyfunction!(limit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(min_degree, m)?)?;
    m.add_function(wrap_pyfunction!(is_connected, m)?)?;
    m.add_function(wrap_pyfunction!(is_k_connected, m)?)?;
    m.add_function(wrap_pyfunction!(connectivity, m)?)?;
    m.add_function(wrap_pyfunction!(has_perfect_matching, m)?)?;
    m.add_function(wrap_pyfunction!(maximum_matching, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonicity, m)?)?;
    m.add_function(wrap_pyfunction!(structure_audit, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_trial, m)?)?;
    m.add_function(wrap_pyfunction!(collector_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
