//! Python module `stdmap`.
//!
//! Points cross the boundary as `(x, y)` tuples. Long computations release
//! the interpreter lock.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use stdmap_core::cocycle;
use stdmap_core::cones;
use stdmap_core::manifolds::{self, Verdict};
use stdmap_core::periodic::{self, StabilityKind};
use stdmap_core::statistics;
use stdmap_core::{Error, TimeDirection, TorusPoint};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::InvalidInput(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(format!("{}: {other}", other.kind())),
    }
}

fn pt((x, y): (f64, f64)) -> TorusPoint {
    TorusPoint::new(x, y)
}

fn pts(v: &[(f64, f64)]) -> Vec<TorusPoint> {
    v.iter().copied().map(pt).collect()
}

fn kind_name(k: StabilityKind) -> &'static str {
    match k {
        StabilityKind::Hyperbolic => "hyperbolic",
        StabilityKind::Elliptic => "elliptic",
        StabilityKind::Parabolic => "parabolic",
    }
}

/// `f(x, y) = (2x - y + k sin(2 pi x), x)` on the unit torus.
#[pyclass(name = "StandardMap", frozen)]
struct PyStandardMap {
    inner: stdmap_core::StandardMap,
}

#[pymethods]
impl PyStandardMap {
    #[new]
    fn new(k: f64) -> PyResult<Self> {
        Ok(Self {
            inner: stdmap_core::StandardMap::new(k).map_err(to_py)?,
        })
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k
    }

    fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let q = self.inner.apply(pt(p));
        (q.x, q.y)
    }

    fn apply_inverse(&self, p: (f64, f64)) -> (f64, f64) {
        let q = self.inner.apply_inverse(pt(p));
        (q.x, q.y)
    }

    /// The orbit `p, f(p), ..., f^n(p)` (or of `f^-1` when `backward`).
    #[pyo3(signature = (p, n, backward=false))]
    fn orbit(&self, p: (f64, f64), n: usize, backward: bool) -> Vec<(f64, f64)> {
        let dir = if backward { TimeDirection::Backward } else { TimeDirection::Forward };
        let mut q = pt(p);
        let mut out = vec![(q.x, q.y)];
        for _ in 0..n {
            q = self.inner.step(q, dir);
            out.push((q.x, q.y));
        }
        out
    }

    fn jacobian(&self, p: (f64, f64)) -> [[f64; 2]; 2] {
        let j = self.inner.jacobian(pt(p));
        [[j.a11, j.a12], [j.a21, j.a22]]
    }

    fn __repr__(&self) -> String {
        format!("StandardMap(k={})", self.inner.k)
    }
}

/// Constants derived from `k > 1`.
#[pyclass(name = "Params", frozen, get_all)]
struct PyParams {
    k: f64,
    theta1: f64,
    theta2: f64,
    r0: f64,
    t: usize,
    crit_halfwidth_outer: f64,
    crit_halfwidth_inner: f64,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(k: f64) -> PyResult<Self> {
        let p = stdmap_core::Params::derive(k).map_err(to_py)?;
        Ok(Self {
            k: p.k,
            theta1: p.theta1,
            theta2: p.theta2,
            r0: p.r0,
            t: p.t,
            crit_halfwidth_outer: p.crit_halfwidth_outer,
            crit_halfwidth_inner: p.crit_halfwidth_inner,
        })
    }

    fn __repr__(&self) -> String {
        format!("Params(k={}, theta1={}, theta2={}, T={})", self.k, self.theta1, self.theta2, self.t)
    }
}

/// Result of a periodic-point census.
#[pyclass(name = "PeriodicDatabase", frozen)]
struct PyPeriodicDatabase {
    inner: periodic::PeriodicDatabase,
}

#[pymethods]
impl PyPeriodicDatabase {
    #[getter]
    fn k(&self) -> f64 {
        self.inner.k
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn grid_res(&self) -> usize {
        self.inner.grid_res
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `[(x, y, trace, lambda, kind), ...]`
    fn points(&self) -> Vec<(f64, f64, f64, f64, &'static str)> {
        self.inner
            .points
            .iter()
            .map(|p| (p.point.x, p.point.y, p.trace, p.lambda, kind_name(p.stability_kind)))
            .collect()
    }

    fn filter(&self, rho: f64) -> Self {
        Self {
            inner: periodic::filter_rho_hyperbolic(&self.inner, rho),
        }
    }

    fn audit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let a = periodic::audit_database(&self.inner);
        let d = PyDict::new(py);
        d.set_item("count", a.count)?;
        d.set_item("closure_violations", a.closure_violations)?;
        d.set_item("involution_violations", a.involution_violations)?;
        d.set_item("periodicity_violations", a.periodicity_violations)?;
        d.set_item("worst_residual", a.worst_residual)?;
        d.set_item("heuristic_ratio", a.heuristic_ratio)?;
        Ok(d)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: periodic::PeriodicDatabase::from_json(text).map_err(to_py)?,
        })
    }
}

/// Fixed points of `f^n` found by Newton's method from a `grid x grid` seed lattice.
#[pyfunction]
#[pyo3(signature = (k, n, grid=None))]
fn find_periodic(py: Python<'_>, k: f64, n: usize, grid: Option<usize>) -> PyResult<PyPeriodicDatabase> {
    let map = stdmap_core::StandardMap::new(k).map_err(to_py)?;
    let grid = grid.unwrap_or_else(|| periodic::default_grid_res(k, n));
    let inner = py.detach(|| periodic::find_periodic(&map, n, grid)).map_err(to_py)?;
    Ok(PyPeriodicDatabase { inner })
}

/// Largest Lyapunov exponent along the orbit of `p`.
#[pyfunction]
#[pyo3(signature = (k, p, horizon=100_000))]
fn lyapunov(py: Python<'_>, k: f64, p: (f64, f64), horizon: usize) -> PyResult<f64> {
    let map = stdmap_core::StandardMap::new(k).map_err(to_py)?;
    py.detach(|| cocycle::lyapunov(&map, pt(p), horizon))
        .map(|e| e.lambda_plus)
        .map_err(to_py)
}

#[pyfunction]
fn pliss_times(seq: Vec<f64>, alpha1: f64, alpha2: f64, eps: f64) -> PyResult<Vec<usize>> {
    cocycle::pliss_times(&seq, alpha1, alpha2, eps)
        .map(|o| o.times)
        .map_err(to_py)
}

#[pyfunction]
fn classify_region<'py>(py: Python<'py>, k: f64, p: (f64, f64)) -> PyResult<Bound<'py, PyDict>> {
    let params = stdmap_core::Params::derive(k).map_err(to_py)?;
    let label = cones::classify_region(&params, pt(p));
    let d = PyDict::new(py);
    d.set_item("in_crit1", label.in_crit1)?;
    d.set_item("in_crit2", label.in_crit2)?;
    d.set_item("g1_component", label.g1_component)?;
    d.set_item("g2_component", label.g2_component)?;
    Ok(d)
}

/// `{"slope", "intercept", "residual", "log_count_over_n"}` for `[(n, count), ...]`.
#[pyfunction]
fn entropy_fit<'py>(py: Python<'py>, counts: Vec<(usize, usize)>) -> PyResult<Bound<'py, PyDict>> {
    let fit = statistics::entropy_fit(&counts).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("residual", fit.residual)?;
    d.set_item("log_count_over_n", fit.log_count_over_n)?;
    Ok(d)
}

/// Fourier coefficients `{(a, b): complex}` of the uniform measure on `points`.
#[pyfunction]
#[pyo3(signature = (points, max_freq=3))]
fn fourier_coefficients<'py>(
    py: Python<'py>,
    points: Vec<(f64, f64)>,
    max_freq: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p = pts(&points);
    let m = py
        .detach(|| statistics::empirical_measure(&p, 1, max_freq))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    let r = max_freq as i64;
    for a in -r..=r {
        for b in -r..=r {
            let c = m.coef(a, b);
            d.set_item((a, b), PyComplex::from_doubles(py, c.re, c.im))?;
        }
    }
    Ok(d)
}

/// Weak distance between the uniform measures on two point sets.
#[pyfunction]
#[pyo3(signature = (a, b, max_freq=3))]
fn measure_distance(py: Python<'_>, a: Vec<(f64, f64)>, b: Vec<(f64, f64)>, max_freq: usize) -> PyResult<f64> {
    let (a, b) = (pts(&a), pts(&b));
    py.detach(|| {
        let ma = statistics::empirical_measure(&a, 1, max_freq)?;
        let mb = statistics::empirical_measure(&b, 1, max_freq)?;
        statistics::measure_distance(&ma, &mb)
    })
    .map_err(to_py)
}

/// `(dense, covering_radius)`: whether every point of the torus lies within
/// `epsilon` of the set.
#[pyfunction]
fn density_check(py: Python<'_>, points: Vec<(f64, f64)>, epsilon: f64) -> PyResult<(bool, f64)> {
    let p = pts(&points);
    py.detach(|| statistics::density_check(&p, epsilon)).map_err(to_py)
}

#[pyfunction]
fn young_dimension(h: f64, lambda_plus: f64, lambda_minus: f64) -> PyResult<f64> {
    statistics::young_dimension(h, lambda_plus, lambda_minus)
        .map(|d| d.dim)
        .map_err(to_py)
}

/// `"related"`, `"not_related"` or `"inconclusive"`.
#[pyfunction]
fn homoclinically_related(py: Python<'_>, k: f64, p: (f64, f64), q: (f64, f64)) -> PyResult<&'static str> {
    let params = stdmap_core::Params::derive(k).map_err(to_py)?;
    let r = py
        .detach(|| manifolds::homoclinically_related(&params, pt(p), pt(q)))
        .map_err(to_py)?;
    Ok(match r.verdict {
        Verdict::Related => "related",
        Verdict::NotRelated => "not_related",
        Verdict::Inconclusive => "inconclusive",
    })
}

#[pymodule]
fn stdmap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStandardMap>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyPeriodicDatabase>()?;
    m.add_function(wrap_pyfunction!(find_periodic, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(pliss_times, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_fit, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(measure_distance, m)?)?;
    m.add_function(wrap_pyfunction!(density_check, m)?)?;
    m.add_function(wrap_pyfunction!(young_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(homoclinically_related, m)?)?;
    Ok(())
}
