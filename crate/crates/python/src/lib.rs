//! Python bindings: special functions, kernels, the scalar solution layer,
//! the finite-spectral limiting-amplitude run and the JSON experiment runner.

use fracwave::fracode;
use fracwave::kernels;
use fracwave::runner::{self, ExperimentConfig};
use fracwave::specfun;
use fracwave::spectral::{self, FiniteSpectralOperator};
use fracwave::{ComplexSample, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument { .. } | Error::Config { .. } | Error::NonFinite(_) | Error::ShapeMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A value with its error bound and the evaluation regime that produced it.
#[pyclass(name = "Sample", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PySample {
    value: Complex64,
    abs_err: f64,
    regime: String,
}

#[pymethods]
impl PySample {
    fn __repr__(&self) -> String {
        format!("Sample(value={}, abs_err={:e}, regime={})", self.value, self.abs_err, self.regime)
    }
}

impl From<ComplexSample> for PySample {
    fn from(s: ComplexSample) -> Self {
        PySample {
            value: s.value,
            abs_err: s.abs_err,
            regime: s.regime.to_string(),
        }
    }
}

fn sample(r: fracwave::Result<ComplexSample>) -> PyResult<PySample> {
    r.map(PySample::from).map_err(to_py)
}

/// Order α ∈ (1, 2) and forcing frequency ω > 0.
#[pyclass(name = "FracParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFracParams(specfun::FracParams);

#[pymethods]
impl PyFracParams {
    #[new]
    fn new(alpha: f64, omega: f64) -> PyResult<Self> {
        specfun::FracParams::new(alpha, omega).map(PyFracParams).map_err(to_py)
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }
    /// i^α ω^α, the eigenvalue of the forcing φ_ω under the Caputo derivative.
    #[getter]
    fn forcing_eig(&self) -> Complex64 {
        self.0.forcing_eig
    }
    fn __repr__(&self) -> String {
        format!("FracParams(alpha={}, omega={})", self.0.alpha, self.0.omega)
    }
}

#[pyfunction]
fn mittag_leffler(alpha: f64, beta: f64, z: Complex64) -> PyResult<PySample> {
    sample(specfun::mittag_leffler(alpha, beta, z))
}

#[pyfunction]
fn wright_phi(rho: f64, delta: f64, z: Complex64) -> PyResult<PySample> {
    sample(specfun::wright_phi(rho, delta, z))
}

#[pyfunction]
fn wright_density(alpha: f64, z: f64) -> PyResult<PySample> {
    sample(specfun::wright_density(alpha, z))
}

#[pyfunction]
fn macdonald_k(nu: f64, z: Complex64) -> PyResult<PySample> {
    sample(specfun::macdonald_k(nu, z))
}

/// Γ_{α,n}(r, t), the forcing kernel.
#[pyfunction]
fn gamma_kernel(params: &PyFracParams, n: usize, r: f64, t: f64) -> PyResult<PySample> {
    sample(kernels::gamma_kernel(&params.0, n, r, t))
}

/// Z₁(r, t) in three dimensions.
#[pyfunction]
fn z1_kernel(alpha: f64, r: f64, t: f64) -> PyResult<PySample> {
    sample(kernels::z1_closed_form(alpha, r, t))
}

/// Response y_λ(t) to the forcing φ_ω, closed form.
#[pyfunction]
fn closed_form_forced(lam: f64, params: &PyFracParams, t: f64) -> PyResult<PySample> {
    sample(fracode::closed_form_forced(lam, &params.0, t))
}

/// Response y_λ(t) by Duhamel quadrature.
#[pyfunction]
fn duhamel_solution(lam: f64, params: &PyFracParams, t: f64) -> PyResult<PySample> {
    sample(fracode::duhamel_solution(lam, &params.0, t))
}

/// Residual points (t, residual, normalized) of u(t)/φ_ω(t) against the
/// resolvent target for the operator diag(eigenvalues).
#[pyfunction]
fn limiting_amplitude_operator(
    eigenvalues: Vec<f64>,
    weights: Vec<Complex64>,
    params: &PyFracParams,
    schedule: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let op = FiniteSpectralOperator::new(eigenvalues, weights).map_err(to_py)?;
    let rep = spectral::limiting_amplitude_operator(&op, &params.0, &schedule).map_err(to_py)?;
    Ok(rep.points.iter().map(|p| (p.t, p.residual, p.normalized)).collect())
}

/// Same names and argument order as `fracwave specfun`.
#[pyfunction]
fn specfun_eval(name: &str, args: Vec<f64>) -> PyResult<PySample> {
    sample(runner::specfun_eval(name, &args))
}

#[pyfunction]
fn validate_config(config_json: &str) -> PyResult<()> {
    ExperimentConfig::from_json(config_json).and_then(|c| c.validate()).map_err(to_py)
}

/// Runs a JSON experiment config and returns the manifest path.
#[pyfunction]
fn run_config(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(to_py)?;
    let summary = py.detach(|| runner::run(&config)).map_err(to_py)?;
    Ok(summary.manifest_path.display().to_string())
}

#[pymodule]
fn fracwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySample>()?;
    m.add_class::<PyFracParams>()?;
    m.add_function(wrap_pyfunction!(mittag_leffler, m)?)?;
    m.add_function(wrap_pyfunction!(wright_phi, m)?)?;
    m.add_function(wrap_pyfunction!(wright_density, m)?)?;
    m.add_function(wrap_pyfunction!(macdonald_k, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(z1_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_forced, m)?)?;
    m.add_function(wrap_pyfunction!(duhamel_solution, m)?)?;
    m.add_function(wrap_pyfunction!(limiting_amplitude_operator, m)?)?;
    m.add_function(wrap_pyfunction!(specfun_eval, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
