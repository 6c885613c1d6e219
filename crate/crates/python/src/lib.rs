//! Python bindings for `qgeo`.
//!
//! Vectors are lists of Python complex numbers, matrices are lists of rows.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qgeo::geodesics::{superposition_point, Geodesic, SuperpositionCoefficients};
use qgeo::linalg::eig_hermitian;
use qgeo::observables::{expectation as expect, heisenberg_check, Observable};
use qgeo::probability::{born as born_prob, DensityOperator};
use qgeo::spectral::{riemannian_spectrum, Interval, SolverOptions};
use qgeo::verify::{run_suite, Suite, VerifyParams};
use qgeo::{CMatrix, CVector, Config, Ray, TangentVector};

fn py_err(e: qgeo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ray(v: Vec<Complex64>) -> PyResult<Ray> {
    Ray::from_entries(v).map_err(py_err)
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    CMatrix::from_row_major(rows.into_iter().flatten().collect()).map_err(py_err)
}

fn observable(rows: Vec<Vec<Complex64>>) -> PyResult<Observable> {
    Observable::new(matrix(rows)?).map_err(py_err)
}

fn config(hbar: f64) -> PyResult<Config> {
    Config::new(hbar).map_err(py_err)
}

fn entries(x: &Ray) -> Vec<Complex64> {
    x.rep().entries().to_vec()
}

/// Fubini-Study distance between the rays of two vectors.
#[pyfunction]
#[pyo3(signature = (x, y, hbar = 1.0))]
fn fs_distance(x: Vec<Complex64>, y: Vec<Complex64>, hbar: f64) -> PyResult<f64> {
    config(hbar)?
        .fs_distance(&ray(x)?, &ray(y)?)
        .map_err(py_err)
}

/// `|(x|y)|^2` for normalized representatives.
#[pyfunction]
fn transition_prob(x: Vec<Complex64>, y: Vec<Complex64>) -> PyResult<f64> {
    qgeo::probability::transition_prob(&ray(x)?, &ray(y)?).map_err(py_err)
}

#[pyfunction]
fn expectation(a: Vec<Vec<Complex64>>, x: Vec<Complex64>) -> PyResult<f64> {
    expect(&observable(a)?, &ray(x)?).map_err(py_err)
}

/// `(Delta A Delta B, |<[A,B]>|/2, slack)` at a state.
#[pyfunction]
fn heisenberg(
    a: Vec<Vec<Complex64>>,
    b: Vec<Vec<Complex64>>,
    x: Vec<Complex64>,
) -> PyResult<(f64, f64, f64)> {
    let c = heisenberg_check(&observable(a)?, &observable(b)?, &ray(x)?).map_err(py_err)?;
    Ok((c.lhs, c.rhs, c.slack))
}

/// Ascending eigenvalues and the matching eigenvectors.
#[pyfunction]
fn eigh(a: Vec<Vec<Complex64>>) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let eig = eig_hermitian(&matrix(a)?).map_err(py_err)?;
    let vectors = eig
        .eigenvectors
        .iter()
        .map(|v| v.entries().to_vec())
        .collect();
    Ok((eig.eigenvalues, vectors))
}

/// Full spectrum from the Riemannian solver with deflation.
#[pyfunction]
#[pyo3(signature = (a, restarts = 8, max_iters = 500, seed = 0, hbar = 1.0))]
fn spectrum(
    a: Vec<Vec<Complex64>>,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    hbar: f64,
) -> PyResult<Vec<f64>> {
    let opts = SolverOptions {
        restarts,
        max_iters,
        seed,
        ..SolverOptions::default()
    };
    let result = riemannian_spectrum(&config(hbar)?, &observable(a)?, &opts).map_err(py_err)?;
    Ok(result.eigenvalues)
}

/// Unit-speed geodesic from `base` along the horizontal part of `direction`, at time `t`.
#[pyfunction]
#[pyo3(signature = (base, direction, t, hbar = 1.0))]
fn geodesic(
    base: Vec<Complex64>,
    direction: Vec<Complex64>,
    t: f64,
    hbar: f64,
) -> PyResult<Vec<Complex64>> {
    let x = ray(base)?;
    let v = TangentVector::horizontal(&x, &CVector::new(direction)).map_err(py_err)?;
    let c = Geodesic::unit(&v).map_err(py_err)?;
    Ok(entries(&c.eval(&config(hbar)?, t)))
}

/// The superposition `alpha x + beta y` of orthogonal states, located geometrically.
#[pyfunction]
#[pyo3(signature = (x, y, alpha, beta, hbar = 1.0))]
fn superposition(
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    alpha: Complex64,
    beta: Complex64,
    hbar: f64,
) -> PyResult<Vec<Complex64>> {
    let coeffs = SuperpositionCoefficients::new(alpha, beta).map_err(py_err)?;
    let p = superposition_point(&config(hbar)?, &ray(x)?, &ray(y)?, &coeffs).map_err(py_err)?;
    Ok(entries(&p))
}

/// Born probability that `A` takes a value in the union of closed intervals.
#[pyfunction]
fn born(
    a: Vec<Vec<Complex64>>,
    state: Vec<Complex64>,
    intervals: Vec<(f64, f64)>,
) -> PyResult<f64> {
    let set = intervals
        .into_iter()
        .map(|(lo, hi)| Interval::new(lo, hi))
        .collect::<qgeo::Result<Vec<_>>>()
        .map_err(py_err)?;
    let w = DensityOperator::pure(&ray(state)?);
    born_prob(&observable(a)?, &w, &set).map_err(py_err)
}

/// Runs a verification suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, dim = 4, trials = 100, seed = 0, hbar = 1.0, tol = None))]
fn verify(
    py: Python<'_>,
    suite: &str,
    dim: usize,
    trials: usize,
    seed: u64,
    hbar: f64,
    tol: Option<f64>,
) -> PyResult<String> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let params = VerifyParams {
        dim,
        trials,
        seed,
        hbar,
        tol,
    };
    let report = py.detach(|| run_suite(suite, &params)).map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn qgeo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fs_distance, m)?)?;
    m.add_function(wrap_pyfunction!(transition_prob, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(heisenberg, m)?)?;
    m.add_function(wrap_pyfunction!(eigh, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(superposition, m)?)?;
    m.add_function(wrap_pyfunction!(born, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
