//! Python bindings. Build with `maturin develop --features extension-module`
//! or `cargo build --features extension-module` and import `pbc_py`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pbc::bench::{boundary_lower_bound as bound, gen_hsc as hsc, HscSpec};
use pbc::circuit::{parse, serialize};
use pbc::emit::{emit as emit_paulis, resource_bounds as bounds, EmitScheme, GhzPrep};
use pbc::hybrid::{estimate_all, plan as sampling_plan};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn backend(name: &str) -> PyResult<pbc::BackendKind> {
    match name {
        "statevector" => Ok(pbc::BackendKind::StateVector),
        "dummy" => Ok(pbc::BackendKind::Dummy),
        _ => Err(PyValueError::new_err(format!("unknown backend {name:?}"))),
    }
}

fn scheme(name: &str) -> PyResult<EmitScheme> {
    Ok(match name {
        "aux" => EmitScheme::AuxQubit,
        "cascade" => EmitScheme::CnotCascade { elide_uncompute: false },
        "cascade-elide" => EmitScheme::CnotCascade { elide_uncompute: true },
        "ghz" => EmitScheme::GhzFanout { prep: GhzPrep::Tree },
        "ghz-const" => EmitScheme::GhzFanout { prep: GhzPrep::ConstDepth },
        _ => return Err(PyValueError::new_err(format!("unknown scheme {name:?}"))),
    })
}

/// Signed Pauli string such as `"-XIZY"`.
#[pyclass(name = "PauliOperator", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPauli(pbc::PauliOperator);

#[pymethods]
impl PyPauli {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyPauli).map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    fn is_hermitian(&self) -> bool {
        self.0.is_hermitian()
    }

    fn commutes(&self, other: &PyPauli) -> PyResult<bool> {
        self.0.commutes(&other.0).map_err(err)
    }

    fn __mul__(&self, other: &PyPauli) -> PyResult<PyPauli> {
        self.0.multiply(&other.0).map(PyPauli).map_err(err)
    }

    fn __eq__(&self, other: &PyPauli) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliOperator('{}')", self.0)
    }
}

/// Circuit in the text format.
#[pyclass(name = "Circuit", frozen)]
struct PyCircuit(pbc::Circuit);

#[pymethods]
impl PyCircuit {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text).map(PyCircuit).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn t_count(&self) -> usize {
        self.0.t_count()
    }

    fn metrics(&self) -> BTreeMap<&'static str, usize> {
        let m = self.0.metrics();
        BTreeMap::from([
            ("depth", m.depth),
            ("count_1q", m.count_1q),
            ("count_cnot", m.count_cnot),
            ("count_t", m.count_t),
            ("count_measure", m.count_measure),
        ])
    }

    fn __str__(&self) -> String {
        serialize(&self.0)
    }

    /// Histogram of output strings over `shots` shots.
    #[pyo3(signature = (shots, backend_name = "statevector", seed = 0))]
    fn sample(&self, py: Python<'_>, shots: usize, backend_name: &str, seed: u64) -> PyResult<BTreeMap<String, usize>> {
        let gc = pbc::gadgetize(&self.0).map_err(err)?;
        let kind = backend(backend_name)?;
        py.detach(|| pbc::sample(&gc, shots, kind, seed))
            .map(|r| r.histogram)
            .map_err(err)
    }

    /// Per-output estimates of P(bit = 1) with `k` virtual qubits.
    #[pyo3(signature = (k, epsilon = 0.1, p_fail = 0.01, seed = 0))]
    fn estimate(&self, py: Python<'_>, k: usize, epsilon: f64, p_fail: f64, seed: u64) -> PyResult<Vec<f64>> {
        let gc = pbc::gadgetize(&self.0).map_err(err)?;
        let outputs: Vec<usize> = (0..gc.output_cbits.len()).collect();
        let r = py
            .detach(|| {
                estimate_all(&gc, &outputs, k, epsilon, p_fail, pbc::BackendKind::StateVector, seed, false)
            })
            .map_err(err)?;
        Ok(r.estimates.iter().map(|e| e.p_hat).collect())
    }
}

/// Hidden-shift circuit and its hidden string.
#[pyfunction]
#[pyo3(signature = (n, nccz = 1, seed = 0, nzcz = 10))]
fn gen_hsc(n: usize, nccz: usize, seed: u64, nzcz: usize) -> PyResult<(PyCircuit, String)> {
    let mut spec = HscSpec::new(n, nccz, seed);
    spec.n_zcz = nzcz;
    let h = hsc(&spec).map_err(err)?;
    let s = h.hidden_string.iter().map(|&b| if b { '1' } else { '0' }).collect();
    Ok((PyCircuit(h.circuit), s))
}

/// `(N, N_naive)` for `k` virtual qubits.
#[pyfunction]
fn plan(k: usize, epsilon: f64, p_fail: f64) -> PyResult<(u64, u64)> {
    let p = sampling_plan(k, epsilon, p_fail).map_err(err)?;
    Ok((p.n, p.n_naive))
}

/// Emits the adaptive circuit measuring `paulis` in order.
#[pyfunction]
#[pyo3(signature = (paulis, scheme_name = "aux"))]
fn emit(paulis: Vec<PyRef<'_, PyPauli>>, scheme_name: &str) -> PyResult<PyCircuit> {
    let ops: Vec<pbc::PauliOperator> = paulis.iter().map(|p| p.0.clone()).collect();
    let t = ops.first().map_or(0, |p| p.width());
    emit_paulis(&ops, t, scheme(scheme_name)?)
        .map(|e| PyCircuit(e.circuit))
        .map_err(err)
}

#[pyfunction]
fn resource_bounds(t: usize) -> (usize, usize, usize) {
    let b = bounds(t);
    (b.n_hs_ub, b.n_cnot_ub, b.depth_ub)
}

#[pyfunction]
fn boundary_lower_bound(cycles: usize) -> f64 {
    bound(cycles)
}

#[pymodule]
fn pbc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauli>()?;
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(gen_hsc, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(emit, m)?)?;
    m.add_function(wrap_pyfunction!(resource_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_lower_bound, m)?)?;
    Ok(())
}
