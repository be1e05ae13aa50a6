//! Python bindings: instance parsing and generation, the exhaustive cycle
//! oracle, the spectrum engine, and witness verification.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cyclespec_core::engine::{self, EngineConfig};
use cyclespec_core::error::Error;
use cyclespec_core::graph;
use cyclespec_core::report;
use cyclespec_core::testbed;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::CapExceeded(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A Hamiltonian instance: vertex order of the Hamilton cycle plus chords.
#[pyclass(name = "HamGraph", frozen)]
struct PyHamGraph {
    inner: graph::HamGraph,
}

#[pymethods]
impl PyHamGraph {
    /// Parses the plain-text instance format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyHamGraph { inner: graph::load_instance(text).map_err(to_py_err)? })
    }

    /// The chained complete-bipartite extremal construction.
    #[staticmethod]
    fn chain_extremal(n: u32, k: u32) -> PyResult<Self> {
        Ok(PyHamGraph { inner: testbed::gen_chain_extremal(n, k).map_err(to_py_err)? })
    }

    /// Random Hamiltonian instance with minimum degree exactly 3.
    #[staticmethod]
    #[pyo3(signature = (n, extra_chords=0, seed=0))]
    fn random_min_deg3(n: u32, extra_chords: u32, seed: u64) -> PyResult<Self> {
        Ok(PyHamGraph {
            inner: testbed::gen_random_min_deg3(n, extra_chords, seed).map_err(to_py_err)?,
        })
    }

    /// Random k-regular Hamiltonian instance.
    #[staticmethod]
    #[pyo3(signature = (n, k=3, seed=0))]
    fn random_regular(n: u32, k: u32, seed: u64) -> PyResult<Self> {
        Ok(PyHamGraph { inner: testbed::gen_random_regular(n, k, seed).map_err(to_py_err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn chord_count(&self) -> usize {
        self.inner.chord_count()
    }

    fn ham_order(&self) -> Vec<u32> {
        self.inner.ham_order().to_vec()
    }

    fn chords(&self) -> Vec<(u32, u32)> {
        self.inner.chords().collect()
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    /// Checks instance invariants; with `theorem_grade`, minimum degree 3.
    #[pyo3(signature = (theorem_grade=true))]
    fn validate(&self, theorem_grade: bool) -> PyResult<()> {
        graph::validate_instance(&self.inner, theorem_grade).map_err(to_py_err)
    }

    /// Length of a chord along the cycle (the shorter arc).
    fn chord_length(&self, u: u32, v: u32) -> PyResult<u64> {
        self.inner.cycle_chord_length((u, v)).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("HamGraph(n={}, chords={})", self.inner.n(), self.inner.chord_count())
    }
}

/// Result of a spectrum run: the distinct lengths, the full witness report,
/// and headline stage statistics.
#[pyclass(name = "SpectrumResult", frozen)]
struct PySpectrumResult {
    #[pyo3(get)]
    lengths: Vec<u64>,
    #[pyo3(get)]
    report: String,
    #[pyo3(get)]
    ell: u64,
    #[pyo3(get)]
    heavy: u64,
    #[pyo3(get)]
    good: u64,
    #[pyo3(get)]
    blocks: u32,
    #[pyo3(get)]
    blocks_selected: u32,
}

#[pymethods]
impl PySpectrumResult {
    fn __len__(&self) -> usize {
        self.lengths.len()
    }

    fn __repr__(&self) -> String {
        format!("SpectrumResult(lengths={}, blocks={}/{})", self.lengths.len(), self.blocks_selected, self.blocks)
    }
}

/// Runs the spectrum engine; `config` accepts the key=value text format.
#[pyfunction]
#[pyo3(signature = (g, config=None))]
fn full_spectrum(g: &PyHamGraph, config: Option<&str>) -> PyResult<PySpectrumResult> {
    let cfg = match config {
        None => EngineConfig::default(),
        Some(text) => EngineConfig::parse(text).map_err(to_py_err)?,
    };
    let rep = engine::full_spectrum(&g.inner, &cfg).map_err(to_py_err)?;
    Ok(PySpectrumResult {
        lengths: rep.lengths_only(),
        report: report::write_report(&rep, &g.inner),
        ell: rep.stats.ell,
        heavy: rep.stats.heavy,
        good: rep.stats.good,
        blocks: rep.stats.blocks,
        blocks_selected: rep.stats.blocks_selected,
    })
}

/// Exact cycle spectrum by exhaustive search (small instances only).
#[pyfunction]
#[pyo3(signature = (g, max_vertices=18, max_steps=200_000_000, time_budget_ms=120_000))]
fn oracle_cycle_spectrum(
    g: &PyHamGraph,
    max_vertices: u32,
    max_steps: u64,
    time_budget_ms: u64,
) -> PyResult<Vec<u64>> {
    let lim = testbed::OracleLimits {
        max_vertices,
        max_steps,
        time_budget: std::time::Duration::from_millis(time_budget_ms),
    };
    Ok(testbed::oracle_cycle_spectrum(&g.inner, &lim)
        .map_err(to_py_err)?
        .into_iter()
        .collect())
}

/// Re-realizes every witness of a report; returns the verified count.
#[pyfunction]
fn verify_report(g: &PyHamGraph, report_text: &str) -> PyResult<usize> {
    report::verify_report(&g.inner, report_text).map_err(to_py_err)
}

#[pymodule]
fn cyclespec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamGraph>()?;
    m.add_class::<PySpectrumResult>()?;
    m.add_function(wrap_pyfunction!(full_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_cycle_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(verify_report, m)?)?;
    Ok(())
}
