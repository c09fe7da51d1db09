//! Python bindings. Sets are passed as `StructuredSet` objects; reports come back as plain dicts.

use gabor_cube::classify::{self as cls, Outcome1D};
use gabor_cube::frame::{self, OnbOptions, TestFunction};
use gabor_cube::ortho;
use gabor_cube::random;
use gabor_cube::sets::{make_2d_theorem, StripAxis, TilingAxis};
use gabor_cube::stft as tf;
use gabor_cube::tiling;
use gabor_cube::{BoxRegion, Error, StructuredSet, Window};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::UnsupportedWindow(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn window(name: &str, dim: usize) -> PyResult<Window> {
    match name {
        "cube" => Window::unit_cube(dim).map_err(py_err),
        "secant" if dim == 1 => Ok(Window::HyperbolicSecant),
        "secant" => Err(PyValueError::new_err("the secant window is one-dimensional")),
        other => Err(PyValueError::new_err(format!("unknown window {other:?}; expected \"cube\" or \"secant\""))),
    }
}

fn centered(dim: usize, radius: f64) -> PyResult<BoxRegion> {
    BoxRegion::centered(dim, radius).map_err(py_err)
}

/// A finite description of a time-frequency set.
#[pyclass(name = "StructuredSet", module = "gabor_cube_py", frozen)]
pub struct PySet {
    inner: StructuredSet,
}

#[pymethods]
impl PySet {
    /// Builds a set from a JSON string or a dict in the CLI input format.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text: String = if spec.is_instance_of::<PyString>() {
            spec.extract()?
        } else {
            spec.py().import("json")?.call_method1("dumps", (spec,))?.extract()?
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = gabor_cube::cli::parse_set(&value).map_err(py_err)?;
        Ok(PySet { inner })
    }

    /// `Z^dim`.
    #[staticmethod]
    fn lattice(dim: usize) -> PyResult<Self> {
        if dim == 0 {
            return Err(PyValueError::new_err("dimension must be positive"));
        }
        Ok(PySet { inner: StructuredSet::lattice(dim) })
    }

    /// A seeded random member of `rows`, `columns`, `standard1d`, `horizontal`, `vertical` or `pseudo`.
    #[staticmethod]
    #[pyo3(signature = (family, seed=0))]
    fn random(family: &str, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inner = match family {
            "rows" => random::random_cube_tiling(&mut rng, TilingAxis::Rows, 6, false),
            "columns" => random::random_cube_tiling(&mut rng, TilingAxis::Columns, 6, false),
            "standard1d" => random::random_standard_1d(&mut rng, 6).map(|d| d.set),
            "horizontal" => random::random_2d_theorem(&mut rng, StripAxis::Horizontal, 4).and_then(make_2d_theorem),
            "vertical" => random::random_2d_theorem(&mut rng, StripAxis::Vertical, 4).and_then(make_2d_theorem),
            "pseudo" => random::random_pseudo_standard(&mut rng, 4),
            other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
        }
        .map_err(py_err)?;
        Ok(PySet { inner })
    }

    /// Ambient dimension `2d`.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn canonical(&self) -> Self {
        PySet { inner: self.inner.canonical() }
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    /// Points in `[-radius, radius)^dim`, lexicographically sorted.
    fn enumerate(&self, radius: f64) -> PyResult<Vec<Vec<f64>>> {
        self.inner.enumerate(&centered(self.inner.dim(), radius)?).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("StructuredSet({})", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// `V_g g(t, ν)` for the unit cube window.
#[pyfunction]
fn stft<'py>(py: Python<'py>, t: Vec<f64>, nu: Vec<f64>) -> PyResult<Bound<'py, PyComplex>> {
    let v = tf::stft_nd(&t, &nu).map_err(py_err)?;
    Ok(PyComplex::from_doubles(py, v.re, v.im))
}

#[pyfunction]
#[pyo3(signature = (t, nu, window="cube"))]
fn stft_magnitude(t: Vec<f64>, nu: Vec<f64>, window: &str) -> PyResult<f64> {
    tf::stft_magnitude(&self::window(window, t.len())?, &t, &nu).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (t, nu, window="cube", eps_int=tf::DEFAULT_INT_TOL))]
fn in_zero_set(t: Vec<f64>, nu: Vec<f64>, window: &str, eps_int: f64) -> PyResult<bool> {
    tf::in_zero_set_with(&self::window(window, t.len())?, &t, &nu, eps_int).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (set, window="cube", radius=3.0))]
fn check_orthogonality<'py>(py: Python<'py>, set: &PySet, window: &str, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = &set.inner;
    let w = self::window(window, s.dim() / 2)?;
    let report = py.detach(|| ortho::check_orthogonality(s, &w, &centered(s.dim(), radius)?).map_err(py_err))?;
    to_py(py, &report)
}

/// Packing and tiling of the enumerated points; the verdict applies to the box shrunk by 1.
#[pyfunction]
#[pyo3(signature = (set, radius=3.0))]
fn check_tiling<'py>(py: Python<'py>, set: &PySet, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = &set.inner;
    let report = py.detach(|| {
        let bx = centered(s.dim(), radius)?;
        tiling::check_tiling(&s.enumerate(&bx).map_err(py_err)?, &bx).map_err(py_err)
    })?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (set, radius=3.0, freq_radius=64.0))]
fn check_onb<'py>(py: Python<'py>, set: &PySet, radius: f64, freq_radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = &set.inner;
    let verdict = py.detach(|| {
        let d = s.dim() / 2;
        let tests = frame::default_test_suite(d).map_err(py_err)?;
        let opts = OnbOptions { freq_radius, ..OnbOptions::default() };
        frame::check_onb(s, &window("cube", d)?, &tests, &centered(s.dim(), radius)?, opts).map_err(py_err)
    })?;
    to_py(py, &verdict)
}

/// `Σ |⟨f, π(p)g⟩|²` over `|λ|_∞ <= freq_radius` for `f = χ_[lo, hi]`.
#[pyfunction]
fn parseval_sum(py: Python<'_>, set: &PySet, lo: Vec<f64>, hi: Vec<f64>, freq_radius: f64) -> PyResult<f64> {
    let s = &set.inner;
    py.detach(|| {
        let f = TestFunction::cube_indicator("cube", lo, hi).map_err(py_err)?;
        let w = window("cube", f.dim())?;
        frame::parseval_sum(&f, s, &w, &f.truncation_box(freq_radius).map_err(py_err)?).map_err(py_err)
    })
}

/// Structure of a verified basis in `d = 1` or `d = 2`.
#[pyfunction]
#[pyo3(signature = (set, radius=3.0))]
fn classify<'py>(py: Python<'py>, set: &PySet, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = &set.inner;
    let bx = centered(s.dim(), radius)?;
    match s.dim() {
        2 => {
            let c: Outcome1D = py.detach(|| cls::classify_1d(s, &bx)).map_err(py_err)?;
            to_py(py, &c)
        }
        4 => to_py(py, &py.detach(|| cls::classify_2d(s, &bx)).map_err(py_err)?),
        n => Err(PyValueError::new_err(format!("classification needs a set in R² or R⁴, got R^{n}"))),
    }
}

#[pyfunction]
#[pyo3(signature = (set, m, radius=3.0))]
fn check_pseudo_structure<'py>(py: Python<'py>, set: &PySet, m: usize, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let s = &set.inner;
    let bx = centered(s.dim(), radius)?;
    to_py(py, &py.detach(|| cls::check_pseudo_structure(s, m, &bx)).map_err(py_err)?)
}

/// `#(Λ ∩ [-T, T)^n) / (2T)^n`.
#[pyfunction]
fn density(set: &PySet, half_width: f64) -> PyResult<f64> {
    let s = &set.inner;
    let pts = s.enumerate(&centered(s.dim(), half_width)?).map_err(py_err)?;
    tiling::estimate_density(&pts, half_width).map_err(py_err)
}

/// Frequencies of points whose time part lies in `anchor + [0,1)^d`, over `|λ|_∞ < freq_radius`.
#[pyfunction]
fn gamma(set: &PySet, anchor: Vec<f64>, freq_radius: f64) -> PyResult<Vec<Vec<f64>>> {
    let hi = anchor.iter().map(|a| a + 1.0).collect();
    let a = BoxRegion::new(anchor.clone(), hi).map_err(py_err)?;
    cls::gamma(&set.inner, &a, &centered(anchor.len(), freq_radius)?).map_err(py_err)
}

#[pymodule]
pub fn gabor_cube_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_function(wrap_pyfunction!(stft, m)?)?;
    m.add_function(wrap_pyfunction!(stft_magnitude, m)?)?;
    m.add_function(wrap_pyfunction!(in_zero_set, m)?)?;
    m.add_function(wrap_pyfunction!(check_orthogonality, m)?)?;
    m.add_function(wrap_pyfunction!(check_tiling, m)?)?;
    m.add_function(wrap_pyfunction!(check_onb, m)?)?;
    m.add_function(wrap_pyfunction!(parseval_sum, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(check_pseudo_structure, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    Ok(())
}
