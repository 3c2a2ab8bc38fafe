//! Python bindings: operators, cone queries, the reaction ODE, sampling and
//! the verification suites.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use curvcone_core::cone::{self, Face};
use curvcone_core::decomposition;
use curvcone_core::flow::{self, TrajectoryConfig};
use curvcone_core::sampling::{Sampler, SamplerConfig};
use curvcone_core::verify::{self, Suite, VerifyConfig};
use curvcone_core::wedge;
use curvcone_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::StepUnderflow { .. } | Error::NonMonotone | Error::RetryExhausted { .. } | Error::Bisection(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Symmetric operator on 2-forms of R^4 in the basis e12, e13, e14, e23, e24, e34.
#[pyclass(name = "CurvatureOperator", from_py_object)]
#[derive(Clone, Copy)]
struct PyOperator(wedge::CurvatureOperator);

#[pymethods]
impl PyOperator {
    /// Build from the 21 upper-triangle entries, row by row.
    #[new]
    fn new(upper: Vec<f64>) -> PyResult<Self> {
        wedge::CurvatureOperator::from_upper(&upper).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(wedge::CurvatureOperator::identity())
    }

    #[staticmethod]
    fn zero() -> Self {
        Self(wedge::CurvatureOperator::zero())
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        wedge::CurvatureOperator::from_json(s).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn upper(&self) -> Vec<f64> {
        self.0.upper().to_vec()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.0.matrix().iter().map(|r| r.to_vec()).collect()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn scalar(&self) -> f64 {
        wedge::scalar(&self.0)
    }

    fn ricci(&self) -> Vec<Vec<f64>> {
        wedge::ricci(&self.0).0.iter().map(|r| r.to_vec()).collect()
    }

    fn bianchi_residual(&self) -> f64 {
        wedge::bianchi_residual(&self.0)
    }

    /// `Q(R) = R² + R#`
    fn q(&self) -> Self {
        Self(wedge::q_operator(&self.0))
    }

    fn sharp(&self, other: &Self) -> Self {
        Self(wedge::sharp(&self.0, &other.0))
    }

    fn shift(&self, alpha: f64) -> Self {
        Self(self.0.shift(alpha))
    }

    fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0.sub(&other.0))
    }

    fn __neg__(&self) -> Self {
        Self(self.0.scale(-1.0))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    /// Blocks and spectra in the self-dual splitting.
    fn decompose<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let j = decomposition::decompose(&self.0).to_json();
        let d = PyDict::new(py);
        d.set_item("A", j.a)?;
        d.set_item("B", j.b)?;
        d.set_item("C", j.c)?;
        d.set_item("eigsA", j.eigs_a)?;
        d.set_item("eigsC", j.eigs_c)?;
        d.set_item("svalsB", j.svals_b)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("CurvatureOperator(norm={})", self.0.norm())
    }
}

#[pyclass(name = "ConeParams", from_py_object)]
#[derive(Clone, Copy)]
struct PyConeParams(cone::ConeParams);

#[pymethods]
impl PyConeParams {
    #[new]
    fn new(eta: f64, mu: f64) -> PyResult<Self> {
        cone::ConeParams::new(eta, mu).map(Self).map_err(to_py)
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    fn __repr__(&self) -> String {
        format!("ConeParams(eta={}, mu={})", self.0.eta, self.0.mu)
    }
}

#[pyfunction]
#[pyo3(signature = (op, params, tol = 0.0))]
fn is_member(op: &PyOperator, params: &PyConeParams, tol: f64) -> bool {
    cone::is_member(&op.0, &params.0, tol)
}

#[pyfunction]
#[pyo3(signature = (op, params, tol = None))]
fn lower_bound_l(op: &PyOperator, params: &PyConeParams, tol: Option<f64>) -> PyResult<f64> {
    let tol = tol.unwrap_or_else(|| cone::default_l_tol(&op.0));
    cone::lower_bound_l(&op.0, &params.0, tol).map_err(to_py)
}

/// The membership report as a dict (same fields as `curvcone check`).
#[pyfunction]
fn check<'py>(py: Python<'py>, op: &PyOperator, params: &PyConeParams) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(&cone::check_report(&op.0, &params.0, None)).expect("report serializes");
    py.import("json")?.call_method1("loads", (text,))
}

/// Integrate `dR/dt = 2Q(R)`; returns `(times, operators, status)`.
#[pyfunction]
#[pyo3(signature = (op, t_max = 0.1, dt = 1e-3))]
fn evolve(op: &PyOperator, t_max: f64, dt: f64) -> PyResult<(Vec<f64>, Vec<PyOperator>, &'static str)> {
    let cfg = TrajectoryConfig {
        dt,
        t_max,
        ..Default::default()
    };
    let traj = flow::integrate(&op.0, &cfg).map_err(to_py)?;
    let times = traj.samples.iter().map(|s| s.t).collect();
    let ops = traj.samples.iter().map(|s| PyOperator(s.op)).collect();
    Ok((times, ops, traj.status.as_str()))
}

/// Draw `n` operators; `kind` is member, boundary-f1/f2/f3 or raw.
#[pyfunction]
#[pyo3(signature = (kind, n, seed = 0, params = None))]
fn sample(kind: &str, n: usize, seed: u64, params: Option<PyConeParams>) -> PyResult<Vec<PyOperator>> {
    let p = match params {
        Some(p) => p.0,
        None => cone::ConeParams::new(1.0, 2.0).expect("valid defaults"),
    };
    let cfg = SamplerConfig {
        seed,
        ..Default::default()
    };
    (0..n as u64)
        .map(|i| {
            let mut s = Sampler::substream(cfg, i);
            let op = match kind {
                "raw" => Ok(s.random_bianchi()),
                "member" => s.random_member(&p),
                "boundary-f1" => s.boundary_member(&p, Face::F1).map(|b| b.op),
                "boundary-f2" => s.boundary_member(&p, Face::F2).map(|b| b.op),
                "boundary-f3" => s.boundary_member(&p, Face::F3).map(|b| b.op),
                _ => return Err(PyValueError::new_err(format!("unknown kind {kind:?}"))),
            };
            op.map(PyOperator).map_err(to_py)
        })
        .collect()
}

/// Run the property suites; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0, samples = 1000))]
fn run_verify(py: Python<'_>, suite: &str, seed: u64, samples: usize) -> PyResult<(bool, String)> {
    let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
    let cfg = VerifyConfig {
        seed,
        samples: samples.max(1),
        suite,
        fault: None,
    };
    let report = py.detach(|| verify::run(&cfg));
    Ok((report.passed, report.to_json()))
}

#[pymodule]
#[pyo3(name = "curvcone")]
fn curvcone_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyConeParams>()?;
    m.add_function(wrap_pyfunction!(is_member, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_l, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
