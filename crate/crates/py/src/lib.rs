//! Python bindings: Butcher tableaux, solver runs, convergence studies,
//! dissipation-dispersion sweeps, stability scans and the exact Euler
//! Riemann solver.

use dirkdg_core::driver::{
    self, parse_scheme, run_convergence, run_simulation, RunConfig,
};
use dirkdg_core::fourier;
use dirkdg_core::problems::{euler::Primitive, riemann};
use dirkdg_core::stepper::DtMode;
use dirkdg_core::tableau;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Butcher tableau of a DIRK or explicit Runge-Kutta scheme.
#[pyclass(name = "ButcherTableau", skip_from_py_object)]
#[derive(Clone)]
struct PyTableau {
    inner: tableau::ButcherTableau,
}

#[pymethods]
impl PyTableau {
    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        self.inner.a.clone()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b.clone()
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.c.clone()
    }

    #[getter]
    fn stages(&self) -> usize {
        self.inner.stages()
    }

    fn order_residuals(&self) -> [f64; 4] {
        self.inner.order_residuals()
    }

    /// Per-stage increments of the composite backward Euler predictor.
    fn predictor_increments(&self) -> Vec<f64> {
        tableau::derive_predictor(&self.inner).increments
    }

    fn __repr__(&self) -> String {
        format!("ButcherTableau(stages={})", self.inner.stages())
    }
}

#[pyfunction]
fn dirk22(gamma: f64) -> PyResult<PyTableau> {
    Ok(PyTableau {
        inner: tableau::dirk22(gamma).map_err(err)?,
    })
}

#[pyfunction]
fn dirk33(gamma: f64) -> PyResult<PyTableau> {
    Ok(PyTableau {
        inner: tableau::dirk33(gamma).map_err(err)?,
    })
}

#[pyfunction]
fn dirk43() -> PyTableau {
    PyTableau {
        inner: tableau::dirk43(),
    }
}

#[pyfunction]
fn scheme_tableau(label: &str) -> PyResult<PyTableau> {
    let spec = parse_scheme(label).map_err(err)?;
    Ok(PyTableau {
        inner: spec.scheme.tableau().clone(),
    })
}

/// Run one simulation from a TOML run configuration; returns cell centers,
/// means per component, the step diagnostics and the L1 error when an exact
/// solution exists.
#[pyfunction]
fn solve(py: Python<'_>, config_toml: &str) -> PyResult<Py<PyDict>> {
    let config = RunConfig::from_toml(config_toml).map_err(err)?;
    let artifacts = run_simulation(&config).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("x", artifacts.grid.centers())?;
    let nc = artifacts.state.ncomp;
    let means: Vec<Vec<f64>> = (0..nc).map(|m| artifacts.state.means(m)).collect();
    out.set_item("means", means)?;
    out.set_item("time", artifacts.state.time)?;
    out.set_item("steps", artifacts.reports.len())?;
    out.set_item("max_troubled", artifacts.max_troubled())?;
    out.set_item("newton_iters", artifacts.total_newton_iters())?;
    out.set_item("krylov_iters", artifacts.total_krylov_iters())?;
    if let Some(e) = artifacts.l1_error().map_err(err)? {
        out.set_item("l1_error", e)?;
    }
    Ok(out.into())
}

/// Convenience constructor for a run configuration in TOML form.
#[pyfunction]
#[pyo3(signature = (problem, scheme, n, ratio=None, dt_over_h=None, t_final=None, delta=None, limiting=true))]
#[allow(clippy::too_many_arguments)]
fn make_config(
    problem: &str,
    scheme: &str,
    n: usize,
    ratio: Option<f64>,
    dt_over_h: Option<f64>,
    t_final: Option<f64>,
    delta: Option<usize>,
    limiting: bool,
) -> PyResult<String> {
    let dt = match (ratio, dt_over_h) {
        (Some(r), None) => DtMode::Ratio(r),
        (None, Some(q)) => DtMode::DtOverH(q),
        (None, None) => DtMode::Ratio(1.0),
        _ => return Err(PyValueError::new_err("give either ratio or dt_over_h")),
    };
    let mut config = RunConfig::new(problem, scheme, n, dt);
    config.t_final = t_final;
    config.delta = delta;
    config.limiting = limiting;
    config.validate().map_err(err)?;
    Ok(config.to_toml())
}

/// Grid-refinement study; returns grids, L1 errors and dyadic rates.
#[pyfunction]
fn convergence(py: Python<'_>, config_toml: &str, grids: Vec<usize>) -> PyResult<Py<PyDict>> {
    let config = RunConfig::from_toml(config_toml).map_err(err)?;
    let report = run_convergence(&config, &grids).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("grids", report.grids.clone())?;
    out.set_item("errors", report.errors.clone())?;
    out.set_item("rates", report.rates.clone())?;
    out.set_item("average_rate", report.average_rate())?;
    Ok(out.into())
}

/// Dissipation-dispersion sweep of a scheme at time-step ratio r over a K
/// grid; rows of (K, re/im frequencies, energies, measures).
#[pyfunction]
#[pyo3(signature = (scheme, r, k_points=128, h=0.05))]
fn dissipation_sweep(
    py: Python<'_>,
    scheme: &str,
    r: f64,
    k_points: usize,
    h: f64,
) -> PyResult<Py<PyDict>> {
    let spec = parse_scheme(scheme).map_err(err)?;
    let ks = fourier::default_k_grid(k_points);
    let rows =
        fourier::sweep_measures(spec.p, spec.scheme.tableau(), h, r, 1.0, &ks).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("k", ks)?;
    out.set_item(
        "m_disp",
        rows.iter().map(|r| r.m_disp).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "m_diss",
        rows.iter().map(|r| r.m_diss).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "energies",
        rows.iter().map(|r| r.energies.clone()).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "re_omega",
        rows.iter()
            .map(|r| r.omega.iter().map(|o| o.re).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )?;
    out.set_item(
        "im_omega",
        rows.iter()
            .map(|r| r.omega.iter().map(|o| o.im).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )?;
    Ok(out.into())
}

/// A-stability verdict and |R(-1e8)| for a scheme label.
#[pyfunction]
fn stability(py: Python<'_>, scheme: &str) -> PyResult<Py<PyDict>> {
    let spec = parse_scheme(scheme).map_err(err)?;
    let scan = fourier::stability_scan(spec.scheme.tableau());
    let out = PyDict::new(py);
    out.set_item("a_stable", scan.a_stable)?;
    out.set_item("max_abs_left", scan.max_abs_left)?;
    out.set_item("max_abs_axis", scan.max_abs_axis)?;
    out.set_item("r_large_negative", scan.r_large_negative)?;
    Ok(out.into())
}

/// Exact Riemann solution of the Euler equations for primitive left/right
/// states (rho, v, p), sampled at the rays x/t.
#[pyfunction]
fn riemann_exact(
    py: Python<'_>,
    left: (f64, f64, f64),
    right: (f64, f64, f64),
    rays: Vec<f64>,
) -> PyResult<Py<PyDict>> {
    let sol = riemann::exact_riemann_euler(
        Primitive::new(left.0, left.1, left.2),
        Primitive::new(right.0, right.1, right.2),
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("p_star", sol.p_star)?;
    out.set_item("v_star", sol.v_star)?;
    out.set_item("rho_star_left", sol.rho_star_left)?;
    out.set_item("rho_star_right", sol.rho_star_right)?;
    out.set_item("max_wave_speed", sol.max_wave_speed())?;
    let samples: Vec<(f64, f64, f64)> = rays
        .iter()
        .map(|&xi| {
            let s = sol.sample(xi);
            (s.rho, s.v, s.p)
        })
        .collect();
    out.set_item("samples", samples)?;
    Ok(out.into())
}

/// Analysis CSV (same schema as the CLI export) for quick plotting.
#[pyfunction]
#[pyo3(signature = (scheme, r, k_points=128, h=0.05))]
fn analysis_csv(scheme: &str, r: f64, k_points: usize, h: f64) -> PyResult<String> {
    let spec = parse_scheme(scheme).map_err(err)?;
    let ks = fourier::default_k_grid(k_points);
    driver::analysis_csv(spec.p, spec.scheme.tableau(), h, r, &ks).map_err(err)
}

#[pymodule]
fn dirkdg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTableau>()?;
    m.add_function(wrap_pyfunction!(dirk22, m)?)?;
    m.add_function(wrap_pyfunction!(dirk33, m)?)?;
    m.add_function(wrap_pyfunction!(dirk43, m)?)?;
    m.add_function(wrap_pyfunction!(scheme_tableau, m)?)?;
    m.add_function(wrap_pyfunction!(make_config, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(dissipation_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_exact, m)?)?;
    m.add_function(wrap_pyfunction!(analysis_csv, m)?)?;
    m.add("GAMMA_LSTABLE_DIRK22", tableau::DIRK22_LSTABLE_GAMMA)?;
    m.add("GAMMA_LSTABLE_DIRK33", tableau::DIRK33_LSTABLE_GAMMA)?;
    Ok(())
}
