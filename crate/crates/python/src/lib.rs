//! Python bindings. Structured results come back as plain dicts and lists.

use std::collections::BTreeMap;

use conjugacy::algebra::poly::rat_from_f64;
use conjugacy::algebra::{parse_rational, verify_lemma_suite, LemmaFamily};
use conjugacy::linearize::{build_conjugacy_on, extend_basin, koenigs_arc, LinearizationChart, Pairing};
use conjugacy::maps::{self, AnyMap, Interval, Map1D, MapSpec};
use conjugacy::normal_forms::{bc_fit as bc_fit_rs, pf_fit as pf_fit_rs, sn_fit as sn_fit_rs};
use conjugacy::orbits::{self, find_fixed_points, find_periodic_orbits_unimodal};
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn params(given: Option<BTreeMap<String, String>>) -> PyResult<BTreeMap<String, BigRational>> {
    given
        .unwrap_or_default()
        .into_iter()
        .map(|(k, v)| Ok((k, parse_rational(&v).map_err(py_err)?)))
        .collect()
}

fn spec_at(spec: &str, mu: Option<f64>) -> PyResult<(MapSpec, BigRational)> {
    let spec = MapSpec::parse(spec).map_err(py_err)?;
    let mu = match mu {
        Some(m) => rat_from_f64(m).ok_or_else(|| py_err(format!("mu = {m} is not finite")))?,
        None if spec.depends_on_mu() => return Err(py_err("map spec depends on mu; pass mu")),
        None => BigRational::from_integer(0.into()),
    };
    Ok((spec, mu))
}

/// A one-dimensional map, smooth or piecewise.
#[pyclass(module = "conjugacy_py", frozen)]
struct Map {
    inner: AnyMap,
}

#[pymethods]
impl Map {
    /// Build a catalog family; parameter values are strings such as "1/2".
    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn catalog(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<Self> {
        let given = self::params(params)?;
        Ok(Self {
            inner: maps::catalog_make(name, &given).map_err(py_err)?,
        })
    }

    /// Build from a JSON map spec at parameter `mu`.
    #[staticmethod]
    #[pyo3(signature = (spec, mu=None))]
    fn from_spec(spec: &str, mu: Option<f64>) -> PyResult<Self> {
        let (spec, mu) = spec_at(spec, mu)?;
        Ok(Self {
            inner: spec.instantiate(&mu).map_err(py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    /// `(lo, hi)`, with infinite ends as `inf`.
    #[getter]
    fn domain(&self) -> (f64, f64) {
        let d = self.inner.domain();
        (d.lo_value(), d.hi_value())
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.eval(x).map_err(py_err)
    }

    #[pyo3(signature = (x, order=1))]
    fn deriv(&self, x: f64, order: usize) -> PyResult<f64> {
        self.inner.deriv(x, order).map_err(py_err)
    }

    #[pyo3(signature = (lo=None, hi=None, grid=4096))]
    fn fixed_points<'py>(&self, py: Python<'py>, lo: Option<f64>, hi: Option<f64>, grid: usize) -> PyResult<Bound<'py, PyAny>> {
        let (dlo, dhi) = self.domain();
        let iv = Interval::closed(lo.unwrap_or(dlo), hi.unwrap_or(dhi)).map_err(py_err)?;
        to_py(py, &find_fixed_points(&self.inner, &iv, grid).map_err(py_err)?)
    }

    #[pyo3(signature = (pmax=6))]
    fn periodic_orbits<'py>(&self, py: Python<'py>, pmax: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &find_periodic_orbits_unimodal(&self.inner, pmax).map_err(py_err)?)
    }

    #[pyo3(signature = (n=1_000_000, bins=50, x0=0.123456789, burn_in=1000, seed=0))]
    fn density<'py>(&self, py: Python<'py>, n: usize, bins: usize, x0: f64, burn_in: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &orbits::empirical_density(&self.inner, x0, n, bins, burn_in, seed).map_err(py_err)?)
    }

    fn __repr__(&self) -> String {
        format!("Map({})", self.inner.name())
    }
}

/// Koenigs linearizing coordinate at a fixed point, extended over a basin.
#[pyclass(module = "conjugacy_py", frozen)]
struct Chart {
    inner: LinearizationChart,
}

fn smooth_arc(map: &Map) -> PyResult<std::sync::Arc<dyn Map1D>> {
    Ok(std::sync::Arc::new(map.inner.clone().into_smooth().map_err(py_err)?))
}

#[pymethods]
impl Chart {
    #[new]
    #[pyo3(signature = (map, x_star, basin=None, tol=1e-13))]
    fn new(map: &Map, x_star: f64, basin: Option<(f64, f64)>, tol: f64) -> PyResult<Self> {
        let mut chart = koenigs_arc(smooth_arc(map)?, x_star, tol).map_err(py_err)?;
        if let Some((lo, hi)) = basin {
            chart = extend_basin(&chart, &Interval::open(lo, hi).map_err(py_err)?).map_err(py_err)?;
        }
        Ok(Self { inner: chart })
    }

    #[getter]
    fn multiplier(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn x_star(&self) -> f64 {
        self.inner.x_star()
    }

    fn phi(&self, x: f64) -> PyResult<f64> {
        self.inner.phi(x).map_err(py_err)
    }

    fn phi_inverse(&self, y: f64) -> PyResult<f64> {
        self.inner.phi_inverse(y).map_err(py_err)
    }

    /// Worst scaled residual of `φ∘f = λφ` over `n` sample points.
    #[pyo3(signature = (n=400))]
    fn schroder_residual(&self, n: usize) -> PyResult<f64> {
        self.inner.schroder_residual(&self.inner.sample_points(n)).map_err(py_err)
    }
}

/// Conjugacy `h = ψ⁻¹∘φ` from chart `f` to chart `g` sampled on `window`.
#[pyfunction(name = "conjugacy")]
#[pyo3(signature = (f, g, window, grid=2001, marked=None))]
fn conjugacy_table<'py>(py: Python<'py>, f: &Chart, g: &Chart, window: (f64, f64), grid: usize, marked: Option<(f64, f64)>) -> PyResult<Bound<'py, PyAny>> {
    let pairing = match marked {
        Some((x0, y0)) => Pairing::Marked { x0, y0 },
        None => Pairing::FixedPoints,
    };
    let w = Interval::closed(window.0, window.1).map_err(py_err)?;
    let t = build_conjugacy_on(&f.inner, &g.inner, pairing, &w, grid).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (t.to_json(&[]).to_string(),))
}

/// Exact check of the functional identity over parameter samples.
#[pyfunction]
#[pyo3(signature = (family, samples=None))]
fn verify_identity<'py>(py: Python<'py>, family: &str, samples: Option<Vec<Vec<String>>>) -> PyResult<Bound<'py, PyAny>> {
    let fam: LemmaFamily = family.parse().map_err(py_err)?;
    let samples = match samples {
        Some(s) => s
            .iter()
            .map(|row| row.iter().map(|v| parse_rational(v).map_err(py_err)).collect())
            .collect::<PyResult<Vec<Vec<BigRational>>>>()?,
        None => fam.default_samples(),
    };
    to_py(py, &verify_lemma_suite(fam, &samples))
}

/// `|λ| = 2^p` on every periodic orbit up to `pmax`.
#[pyfunction]
#[pyo3(signature = (family, params=None, pmax=8))]
fn multiplier_law<'py>(py: Python<'py>, family: &str, params: Option<BTreeMap<String, String>>, pmax: usize) -> PyResult<Bound<'py, PyAny>> {
    let (map, h) = orbits::law_pair(family, &self::params(params)?).map_err(py_err)?;
    to_py(py, &orbits::verify_multiplier_law(&map, &h, pmax).map_err(py_err)?)
}

#[pyfunction]
fn sn_fit<'py>(py: Python<'py>, spec: &str, mu: f64) -> PyResult<Bound<'py, PyAny>> {
    let fam = MapSpec::parse(spec).map_err(py_err)?.family().smooth();
    to_py(py, &sn_fit_rs(&fam, mu).map_err(py_err)?)
}

#[pyfunction]
fn pf_fit<'py>(py: Python<'py>, spec: &str, mu: f64) -> PyResult<Bound<'py, PyAny>> {
    let fam = MapSpec::parse(spec).map_err(py_err)?.family().smooth();
    to_py(py, &pf_fit_rs(&fam, mu).map_err(py_err)?)
}

#[pyfunction]
fn bc_fit<'py>(py: Python<'py>, spec: &str, mu: f64) -> PyResult<Bound<'py, PyAny>> {
    let fam = MapSpec::parse(spec).map_err(py_err)?.family().piecewise();
    to_py(py, &bc_fit_rs(&fam, mu).map_err(py_err)?)
}

#[pyfunction]
fn catalog(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &maps::catalog())
}

#[pyfunction]
fn elliptic_k(m: f64) -> f64 {
    orbits::elliptic_k(m)
}

#[pyfunction]
fn kf_mass(l: f64, a: f64, b: f64) -> f64 {
    orbits::kf_mass(l, a, b)
}

#[pymodule]
fn conjugacy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Map>()?;
    m.add_class::<Chart>()?;
    m.add_function(wrap_pyfunction!(conjugacy_table, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identity, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_law, m)?)?;
    m.add_function(wrap_pyfunction!(sn_fit, m)?)?;
    m.add_function(wrap_pyfunction!(pf_fit, m)?)?;
    m.add_function(wrap_pyfunction!(bc_fit, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(elliptic_k, m)?)?;
    m.add_function(wrap_pyfunction!(kf_mass, m)?)?;
    Ok(())
}
