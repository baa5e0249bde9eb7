use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use subcut::cuts::NewtonParams;
use subcut::envelope::{envelope_eval, greedy_vertex, Permutation};
use subcut::harness::{self, CutMode, RunConfig};
use subcut::models::{build_maxcut_model, build_mubo_model, BmpInstance, BuiltModel};
use subcut::submodular::{self as sm, MultilinearFunction, SubmodularOracle, WeightedGraph};

fn to_py(e: subcut::Error) -> PyErr {
    match e {
        subcut::Error::Input(_)
        | subcut::Error::Model(_)
        | subcut::Error::Capacity { .. }
        | subcut::Error::Parse { .. }
        | subcut::Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Undirected graph with nonnegative edge weights; vertices are 0-based.
#[pyclass(name = "Graph", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        WeightedGraph::new(n, edges).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges.clone()
    }

    fn cut_value(&self, x: Vec<bool>) -> PyResult<f64> {
        if x.len() != self.inner.n {
            return Err(PyValueError::new_err(format!("expected {} entries", self.inner.n)));
        }
        Ok(self.inner.cut_value(&x))
    }

    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n, self.inner.edges.len())
    }
}

/// Multilinear polynomial `sum_k a_k prod_{j in A_k} x_j` over 0-based indices.
#[pyclass(name = "Multilinear", frozen, from_py_object)]
#[derive(Clone)]
struct PyMultilinear {
    inner: MultilinearFunction,
}

#[pymethods]
impl PyMultilinear {
    #[new]
    fn new(n: usize, terms: Vec<(f64, Vec<usize>)>) -> PyResult<Self> {
        MultilinearFunction::new(n, terms).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn terms(&self) -> Vec<(f64, Vec<usize>)> {
        self.inner.terms().iter().map(|t| (t.coefficient, t.support.clone())).collect()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!("expected {} entries", self.inner.n())));
        }
        Ok(self.inner.eval(&x))
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

/// Normalized set-function oracle with `f(0) = 0`.
#[pyclass(name = "Oracle", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOracle {
    inner: SubmodularOracle,
}

#[pymethods]
impl PyOracle {
    #[staticmethod]
    fn cut(graph: &PyGraph) -> PyResult<Self> {
        sm::cut_oracle(&graph.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn multilinear(p: &PyMultilinear) -> Self {
        Self { inner: sm::multilinear_oracle(&p.inner) }
    }

    #[staticmethod]
    fn modular(c: Vec<f64>) -> PyResult<Self> {
        sm::modular_oracle(c).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn evaluate(&self, x: Vec<bool>) -> PyResult<f64> {
        self.inner.evaluate(&x).map_err(to_py)
    }

    /// Extended envelope at `x` as `(value, subgradient, permutation)`.
    fn envelope(&self, x: Vec<f64>) -> PyResult<(f64, Vec<f64>, Vec<usize>)> {
        let e = envelope_eval(&self.inner, &x).map_err(to_py)?;
        Ok((e.value, e.subgradient, e.perm.images().to_vec()))
    }

    /// Greedy vertex for a 0-based permutation.
    fn greedy_vertex(&self, perm: Vec<usize>) -> PyResult<Vec<f64>> {
        let perm = Permutation::new(perm).map_err(to_py)?;
        greedy_vertex(&self.inner, &perm).map(|v| v.sigma).map_err(to_py)
    }

    fn is_submodular(&self) -> PyResult<bool> {
        sm::is_submodular_bruteforce(&self.inner).map_err(to_py)
    }
}

/// Splits a polynomial into submodular parts `(f1, f2)` with `p = f1 - f2`.
#[pyfunction]
fn ss_decompose(p: &PyMultilinear) -> (PyOracle, PyOracle) {
    let ss = sm::ss_decompose(&p.inner);
    (PyOracle { inner: ss.f1 }, PyOracle { inner: ss.f2 })
}

#[pyclass(name = "RootReport", frozen, get_all)]
struct PyRootReport {
    instance: String,
    mode: String,
    d1: f64,
    d2: f64,
    p: f64,
    closed: f64,
    cuts: usize,
    rounds: usize,
    sep_time_ms: f64,
    total_time_ms: f64,
    failed: bool,
    bounds: Vec<f64>,
    cut_log: Vec<String>,
}

#[pymethods]
impl PyRootReport {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{:.3}",
            self.instance, self.mode, self.d1, self.d2, self.p, self.closed, self.cuts, self.sep_time_ms, self.total_time_ms
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "RootReport(mode={}, d1={}, d2={}, p={}, closed={:.4}, cuts={})",
            self.mode, self.d1, self.d2, self.p, self.closed, self.cuts
        )
    }
}

/// LP relaxation of a max-cut or binary polynomial instance.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: BuiltModel,
    name: String,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn maxcut(graph: &PyGraph) -> PyResult<Self> {
        let inner = build_maxcut_model(&graph.inner).map_err(to_py)?;
        Ok(Self { inner, name: "graph".into() })
    }

    #[staticmethod]
    #[pyo3(signature = (objective, constraints = Vec::new(), cardinality = None))]
    fn polynomial(objective: &PyMultilinear, constraints: Vec<PyMultilinear>, cardinality: Option<usize>) -> PyResult<Self> {
        let inst = BmpInstance::new(
            objective.inner.clone(),
            constraints.into_iter().map(|c| c.inner).collect(),
            cardinality,
        )
        .map_err(to_py)?;
        let inner = build_mubo_model(&inst).map_err(to_py)?;
        Ok(Self { inner, name: "polynomial".into() })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let instance = subcut::formats::read_instance(&path).map_err(to_py)?;
        let inner = harness::build_model(&instance).map_err(to_py)?;
        let name = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Ok(Self { inner, name })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }

    /// Best feasible binary point and its value, by enumeration.
    fn optimum(&self, py: Python<'_>) -> PyResult<(f64, Vec<bool>)> {
        py.detach(|| harness::reference_by_enumeration(&self.inner)).map_err(to_py)
    }

    #[pyo3(signature = (mode = "submodular", rounds = 10, seed = 0, max_cuts_per_round = 50, reference = None))]
    fn root(
        &self,
        py: Python<'_>,
        mode: &str,
        rounds: usize,
        seed: u64,
        max_cuts_per_round: usize,
        reference: Option<f64>,
    ) -> PyResult<PyRootReport> {
        let cfg = RunConfig {
            mode: mode.parse::<CutMode>().map_err(to_py)?,
            rounds,
            seed,
            max_cuts_per_round,
            newton: NewtonParams::default(),
            reference,
            ..RunConfig::default()
        };
        let r = py
            .detach(|| harness::root_loop(&self.inner, &cfg, &self.name, None))
            .map_err(to_py)?;
        Ok(PyRootReport {
            instance: r.instance,
            mode: r.mode.to_string(),
            d1: r.d1,
            d2: r.d2,
            p: r.p,
            closed: r.closed,
            cuts: r.cuts,
            rounds: r.rounds,
            sep_time_ms: r.sep_time_ms,
            total_time_ms: r.total_time_ms,
            failed: r.failed,
            bounds: r.bounds,
            cut_log: r.cut_log,
        })
    }
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0, density = 0.5))]
fn generate_g05(n: usize, seed: u64, density: f64) -> PyResult<PyGraph> {
    harness::generate_g05(n, density, seed).map(|inner| PyGraph { inner }).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0, density = 0.1))]
fn generate_pw(n: usize, seed: u64, density: f64) -> PyResult<PyGraph> {
    harness::generate_pw(n, density, seed).map(|inner| PyGraph { inner }).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0, max_lag = 3))]
fn generate_autocorr(n: usize, seed: u64, max_lag: usize) -> PyResult<PyMultilinear> {
    harness::generate_autocorr(n, max_lag, seed)
        .map(|inst| PyMultilinear { inner: inst.objective })
        .map_err(to_py)
}

#[pyfunction]
fn closed_gap(d1: f64, d2: f64, p: f64) -> f64 {
    harness::closed_gap(d1, d2, p)
}

#[pyfunction]
#[pyo3(signature = (values, shift = 1.0))]
fn shifted_geometric_mean(values: Vec<f64>, shift: f64) -> f64 {
    harness::shifted_geometric_mean(&values, shift)
}

#[pymodule]
#[pyo3(name = "subcut")]
fn subcut_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyMultilinear>()?;
    m.add_class::<PyOracle>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyRootReport>()?;
    m.add_function(wrap_pyfunction!(ss_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(generate_g05, m)?)?;
    m.add_function(wrap_pyfunction!(generate_pw, m)?)?;
    m.add_function(wrap_pyfunction!(generate_autocorr, m)?)?;
    m.add_function(wrap_pyfunction!(closed_gap, m)?)?;
    m.add_function(wrap_pyfunction!(shifted_geometric_mean, m)?)?;
    Ok(())
}
