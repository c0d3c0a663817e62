//! Python bindings for the multi-term fractional diffusion toolkit.
//!
//! Grids, models and excitations are exposed as classes; solvers and the
//! recovery pipeline are plain functions returning Python data.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use multifrac_core::caputo::Excitation as CoreExcitation;
use multifrac_core::config::load_config;
use multifrac_core::forward::{self, BoundaryPair, PicardOptions, SolutionField};
use multifrac_core::inverse::{self, RecoveryOptions};
use multifrac_core::laplace_dtn::{self, SGrid, SymbolSamples};
use multifrac_core::melf;
use multifrac_core::model::FractionalModel as CoreModel;
use multifrac_core::pipeline::run_pipeline;
use multifrac_core::spectral::SpatialGrid as CoreGrid;
use multifrac_core::Error;

fn to_py(err: Error) -> PyErr {
    match err.exit_code() {
        2 => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

/// Uniform grid on [0, L] with `n_interior` interior nodes.
#[pyclass(module = "multifrac", frozen)]
struct SpatialGrid {
    inner: CoreGrid,
}

#[pymethods]
impl SpatialGrid {
    #[new]
    fn new(length: f64, n_interior: usize) -> PyResult<Self> {
        Ok(Self { inner: CoreGrid::new(length, n_interior).map_err(to_py)? })
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn n_interior(&self) -> usize {
        self.inner.n_interior()
    }

    /// Closed nodes including both endpoints.
    fn nodes(&self) -> Vec<f64> {
        self.inner.closed_nodes()
    }

    fn __repr__(&self) -> String {
        format!("SpatialGrid(length={}, n_interior={})", self.inner.length(), self.inner.n_interior())
    }
}

/// Boundary excitation λ(t).
#[pyclass(module = "multifrac", frozen)]
struct Excitation {
    inner: CoreExcitation,
}

#[pymethods]
impl Excitation {
    /// λ(t) = a t² e^{−ct}.
    #[staticmethod]
    #[pyo3(signature = (a = 1.0, c = 1.0))]
    fn poly_exp(a: f64, c: f64) -> PyResult<Self> {
        let inner = CoreExcitation::from_parameters("poly_exp", &[a, c]).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Spline through uniformly spaced samples starting at t = 0.
    #[staticmethod]
    fn custom_series(dt: f64, values: Vec<f64>) -> PyResult<Self> {
        let mut parameters = vec![dt];
        parameters.extend(values);
        let inner = CoreExcitation::from_parameters("custom_series", &parameters).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.value(t)
    }

    /// Caputo derivative of order `alpha` at time `t`.
    fn caputo(&self, alpha: f64, t: f64) -> PyResult<f64> {
        self.inner.caputo(alpha, t).map_err(to_py)
    }

    /// Laplace transform at `s`.
    fn laplace(&self, s: f64) -> PyResult<f64> {
        self.inner.laplace(s).map_err(to_py)
    }
}

/// Admissible coefficient tuple (orders, term coefficients, potential) on nodes.
#[pyclass(module = "multifrac", frozen)]
struct FractionalModel {
    inner: CoreModel,
}

#[pymethods]
impl FractionalModel {
    /// Nodal fields: `p_terms[j][i]` and `potential[i]` at `nodes[i]`.
    #[new]
    fn new(nodes: Vec<f64>, alphas: Vec<f64>, p_terms: Vec<Vec<f64>>, potential: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: CoreModel::new(nodes, alphas, p_terms, potential).map_err(to_py)? })
    }

    /// Constant coefficients on the closed nodes of `grid`.
    #[staticmethod]
    fn constant(grid: &SpatialGrid, alphas: Vec<f64>, p_terms: Vec<f64>, potential: f64) -> PyResult<Self> {
        let inner = CoreModel::constant(&grid.inner, &alphas, &p_terms, potential).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell()
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.inner.alphas().to_vec()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn p_terms(&self) -> Vec<Vec<f64>> {
        self.inner.p_terms().to_vec()
    }

    #[getter]
    fn potential(&self) -> Vec<f64> {
        self.inner.potential().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("FractionalModel(ell={}, alphas={:?})", self.inner.ell(), self.inner.alphas())
    }
}

/// Sampled solution u(t, x) with boundary fluxes.
#[pyclass(module = "multifrac", frozen, get_all)]
struct Solution {
    t: Vec<f64>,
    x: Vec<f64>,
    values: Vec<Vec<f64>>,
    flux_left: Vec<f64>,
    flux_right: Vec<f64>,
    increments: Vec<f64>,
}

impl From<SolutionField> for Solution {
    fn from(sol: SolutionField) -> Self {
        Self {
            t: sol.t().to_vec(),
            x: sol.grid().closed_nodes(),
            values: sol.values().to_vec(),
            flux_left: sol.flux_left().to_vec(),
            flux_right: sol.flux_right().to_vec(),
            increments: sol.increments().to_vec(),
        }
    }
}

/// Outcome of term-count detection.
#[pyclass(module = "multifrac", frozen, get_all)]
struct Recovery {
    ell: usize,
    alphas: Vec<f64>,
    p_terms: Vec<Vec<f64>>,
    potential: Vec<f64>,
    locations: Vec<f64>,
    residual_per_ell: Vec<f64>,
    violations: Vec<String>,
}

fn excitation_or_default(exc: Option<&Excitation>) -> CoreExcitation {
    exc.map_or_else(CoreExcitation::default, |e| e.inner.clone())
}

/// Mittag-Leffler function E_{α,β}(z).
#[pyfunction]
#[pyo3(signature = (alpha, beta, z))]
fn ml_eval(alpha: f64, beta: f64, z: f64) -> PyResult<f64> {
    melf::mittag_leffler(alpha, beta, z).map_err(to_py)
}

/// Implicit L1 time stepping up to `t_end`.
#[pyfunction]
#[pyo3(signature = (model, grid, g, dt, t_end, excitation = None))]
fn solve_l1(
    py: Python<'_>,
    model: &FractionalModel,
    grid: &SpatialGrid,
    g: (f64, f64),
    dt: f64,
    t_end: f64,
    excitation: Option<&Excitation>,
) -> PyResult<Solution> {
    let exc = excitation_or_default(excitation);
    let (model, grid) = (model.inner.clone(), grid.inner);
    py.detach(|| forward::solve_l1(&model, &exc, BoundaryPair::new(g.0, g.1), &grid, dt, t_end))
        .map(Solution::from)
        .map_err(to_py)
}

/// Picard iteration of the mild formulation, sampled at `times`.
#[pyfunction]
#[pyo3(signature = (model, grid, g, times, excitation = None, tol = 1e-8, max_iter = 30))]
#[allow(clippy::too_many_arguments)]
fn solve_picard(
    py: Python<'_>,
    model: &FractionalModel,
    grid: &SpatialGrid,
    g: (f64, f64),
    times: Vec<f64>,
    excitation: Option<&Excitation>,
    tol: f64,
    max_iter: usize,
) -> PyResult<Solution> {
    let exc = excitation_or_default(excitation);
    let (model, grid) = (model.inner.clone(), grid.inner);
    let options = PicardOptions { tol, max_iter, ..PicardOptions::default() };
    py.detach(|| forward::solve_picard(&model, &exc, BoundaryPair::new(g.0, g.1), &grid, &times, &options))
        .map(Solution::from)
        .map_err(to_py)
}

/// P_s(x) = p(x) − Σ p_j(x) s^{α_j} at the given locations.
#[pyfunction]
fn spectral_symbol(model: &FractionalModel, s: f64, locations: Vec<f64>) -> PyResult<Vec<f64>> {
    laplace_dtn::spectral_symbol(&model.inner, s, &locations).map_err(to_py)
}

/// Recovers (ℓ, α, p_j, p) from symbol samples `values[k][m]` at `s_values[k]`, `locations[m]`.
#[pyfunction]
#[pyo3(signature = (s_values, locations, values, ell_max = 3, seed = 0, c1 = None))]
fn detect_term_count(
    py: Python<'_>,
    s_values: Vec<f64>,
    locations: Vec<f64>,
    values: Vec<Vec<f64>>,
    ell_max: usize,
    seed: u64,
    c1: Option<f64>,
) -> PyResult<Recovery> {
    let c1 = c1.unwrap_or_else(|| s_values.iter().copied().fold(f64::INFINITY, f64::min));
    let s_grid = SGrid::new(s_values, c1).map_err(to_py)?;
    let samples = SymbolSamples::new(s_grid, locations, values).map_err(to_py)?;
    let options = RecoveryOptions { seed, ..RecoveryOptions::default() };
    let result = py.detach(|| inverse::detect_term_count(&samples, ell_max, &options)).map_err(to_py)?;
    Ok(Recovery {
        ell: result.ell,
        alphas: result.fit.alphas,
        p_terms: result.fit.p_terms,
        potential: result.fit.potential,
        locations: result.locations,
        residual_per_ell: result.residual_per_ell,
        violations: result.violations,
    })
}

/// Runs the full experiment for a JSON config; returns the summary as a JSON string.
#[pyfunction]
fn pipeline(py: Python<'_>, config: PathBuf, output: PathBuf) -> PyResult<String> {
    let cfg = load_config(&config).map_err(to_py)?;
    let report = py.detach(|| run_pipeline(&cfg, &output)).map_err(to_py)?;
    serde_json::to_string_pretty(&report.summary).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn multifrac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SpatialGrid>()?;
    m.add_class::<Excitation>()?;
    m.add_class::<FractionalModel>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Recovery>()?;
    m.add_function(wrap_pyfunction!(ml_eval, m)?)?;
    m.add_function(wrap_pyfunction!(solve_l1, m)?)?;
    m.add_function(wrap_pyfunction!(solve_picard, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(detect_term_count, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    Ok(())
}
