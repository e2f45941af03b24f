//! Python bindings: polytopes, simple cones, solid angles, lattice sums and
//! the identity checks. Reports come back as plain dicts.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

use solidsum_core::macdonald::{self, LimitConfig, DEFAULT_TOLERANCE, ZERO_TOLERANCE};
use solidsum_core::oracle::{self, OracleMethod, DEFAULT_ORACLE_SAMPLES};
use solidsum_core::solid_angle::{self, DEFAULT_SAMPLES};
use solidsum_core::transforms::{ComplexPoint, DampedSumConfig};
use solidsum_core::{lattice_sum, polytope, Error};

create_exception!(solidsum, SolidsumError, PyValueError);

fn py_err(e: Error) -> PyErr {
    SolidsumError::new_err(e.to_string())
}

fn to_dict(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn config(p: f64) -> PyResult<DampedSumConfig> {
    DampedSumConfig::new(p).map_err(py_err)
}

fn oracle_method(name: &str) -> PyResult<OracleMethod> {
    match name {
        "auto" => Ok(OracleMethod::Auto),
        "exact" => Ok(OracleMethod::Exact2D),
        "mc" => Ok(OracleMethod::MC),
        other => Err(SolidsumError::new_err(format!(
            "method must be 'auto', 'exact' or 'mc', got {other:?}"
        ))),
    }
}

/// A convex polytope given by its vertices.
#[pyclass(name = "Polytope", module = "solidsum", skip_from_py_object)]
#[derive(Clone)]
pub struct PyPolytope {
    inner: polytope::Polytope,
}

#[pymethods]
impl PyPolytope {
    #[new]
    fn new(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        let inner = polytope::load_polytope(dim, &vertices).map_err(py_err)?;
        Ok(PyPolytope { inner })
    }

    /// Parses `{"dim": d, "vertices": [...]}`; entries may be strings such as "sqrt(3)".
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPolytope {
            inner: polytope::from_json(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyPolytope {
            inner: polytope::read_polytope(std::path::Path::new(path)).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().to_vec()
    }

    fn to_json(&self) -> String {
        polytope::to_json(&self.inner).to_string()
    }

    fn lattice_points(&self, t: f64) -> Vec<Vec<i64>> {
        polytope::lattice_points(&self.inner, t)
    }

    /// Simple cones of the tangent cone at vertex `i` (primitive generators).
    fn vertex_cones(&self, i: usize) -> PyResult<Vec<PySimpleCone>> {
        Ok(polytope::vertex_simple_cones(&self.inner, i)
            .map_err(py_err)?
            .into_iter()
            .map(|inner| PySimpleCone { inner })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Polytope(dim={}, vertices={})", self.inner.dim(), self.inner.vertices().len())
    }
}

/// A cone with exactly `d` independent generators.
#[pyclass(name = "SimpleCone", module = "solidsum", skip_from_py_object)]
#[derive(Clone)]
pub struct PySimpleCone {
    inner: solidsum_core::SimpleCone,
}

#[pymethods]
impl PySimpleCone {
    #[new]
    fn new(apex: Vec<f64>, generators: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PySimpleCone {
            inner: solidsum_core::SimpleCone::new(apex, generators).map_err(py_err)?,
        })
    }

    #[getter]
    fn apex(&self) -> Vec<f64> {
        self.inner.apex().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<Vec<f64>> {
        self.inner.generators().to_vec()
    }

    #[getter]
    fn det(&self) -> f64 {
        self.inner.det()
    }

    fn __repr__(&self) -> String {
        format!("SimpleCone(apex={:?}, generators={:?})", self.inner.apex(), self.inner.generators())
    }
}

/// Exact planar solid angle of the cone spanned by two generators (p = 1 or 2).
#[pyfunction]
#[pyo3(signature = (generators, p = 2.0))]
fn solid_angle_exact(generators: Vec<Vec<f64>>, p: f64) -> PyResult<f64> {
    let r = if p == 2.0 {
        solid_angle::solid_angle_exact_2d(&generators)
    } else if p == 1.0 {
        solid_angle::solid_angle_exact_2d_l1(&generators)
    } else {
        return Err(SolidsumError::new_err("exact planar angles need p = 1 or p = 2"));
    };
    Ok(r.map_err(py_err)?.value)
}

/// Monte Carlo solid angle of the cone at its apex: (value, std_error).
#[pyfunction]
#[pyo3(signature = (cone, p = 2.0, n_samples = DEFAULT_SAMPLES, seed = 0))]
fn solid_angle_mc(cone: &PySimpleCone, p: f64, n_samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let r = solid_angle::solid_angle_mc(&cone.inner, cone.inner.apex(), p, 1.0, n_samples, seed)
        .map_err(py_err)?;
    Ok((r.value, r.std_error))
}

/// alpha_K(s) of a simple cone, extrapolated: (value, error).
#[pyfunction]
#[pyo3(signature = (cone, s, p = 2.0))]
fn alpha_cone(cone: &PySimpleCone, s: Vec<Complex64>, p: f64) -> PyResult<(Complex64, f64)> {
    let r = lattice_sum::alpha_cone(&cone.inner, &ComplexPoint::new(s), &config(p)?).map_err(py_err)?;
    Ok((r.value, r.error))
}

/// A_P(t, s) from the vertex cones: (value, error).
#[pyfunction]
#[pyo3(signature = (polytope, t, s, p = 2.0))]
fn a_of_t_s(polytope: &PyPolytope, t: f64, s: Vec<Complex64>, p: f64) -> PyResult<(Complex64, f64)> {
    let r = macdonald::a_of_t_s(&polytope.inner, t, &ComplexPoint::new(s), &config(p)?).map_err(py_err)?;
    Ok((r.value, r.error))
}

/// A_P(t) as the s -> 0 limit: (value, error).
#[pyfunction]
#[pyo3(signature = (polytope, t, p = 2.0, direction = None, seed = 0))]
fn a_of_t(
    polytope: &PyPolytope,
    t: f64,
    p: f64,
    direction: Option<Vec<f64>>,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let limit = LimitConfig {
        direction,
        seed,
        ..Default::default()
    };
    let r = macdonald::a_of_t(&polytope.inner, t, &limit, &config(p)?).map_err(py_err)?;
    Ok((r.value, r.error))
}

/// Brute-force A_P(t): (value, std_error).
#[pyfunction]
#[pyo3(signature = (polytope, t, p = 2.0, method = "auto", n_samples = DEFAULT_ORACLE_SAMPLES, seed = 0))]
fn oracle_a_t(
    polytope: &PyPolytope,
    t: f64,
    p: f64,
    method: &str,
    n_samples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let r = oracle::a_t_oracle(&polytope.inner, t, p, oracle_method(method)?, n_samples, seed)
        .map_err(py_err)?;
    Ok((r.value, r.std_error))
}

/// Brute-force alpha_{tP}(s): (value, std_error).
#[pyfunction]
#[pyo3(signature = (polytope, t, s, p = 2.0, method = "auto", n_samples = DEFAULT_ORACLE_SAMPLES, seed = 0))]
fn oracle_alpha(
    polytope: &PyPolytope,
    t: f64,
    s: Vec<Complex64>,
    p: f64,
    method: &str,
    n_samples: usize,
    seed: u64,
) -> PyResult<(Complex64, f64)> {
    let r = oracle::alpha_oracle(
        &polytope.inner,
        t,
        &ComplexPoint::new(s),
        p,
        oracle_method(method)?,
        n_samples,
        seed,
    )
    .map_err(py_err)?;
    Ok((r.value, r.std_error))
}

#[pyfunction]
#[pyo3(signature = (polytope, s, p = 2.0, tolerance = DEFAULT_TOLERANCE))]
fn verify_brion(py: Python<'_>, polytope: &PyPolytope, s: Vec<Complex64>, p: f64, tolerance: f64) -> PyResult<Py<PyAny>> {
    let r = macdonald::verify_brion(&polytope.inner, &ComplexPoint::new(s), &config(p)?, tolerance)
        .map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (polytope, t, s, p = 2.0, tolerance = DEFAULT_TOLERANCE))]
fn verify_macdonald(
    py: Python<'_>,
    polytope: &PyPolytope,
    t: f64,
    s: Vec<Complex64>,
    p: f64,
    tolerance: f64,
) -> PyResult<Py<PyAny>> {
    let r = macdonald::verify_macdonald(&polytope.inner, t, &ComplexPoint::new(s), &config(p)?, tolerance)
        .map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (cone, shift, s, p = 2.0, tolerance = 1e-5))]
fn verify_cone_reciprocity(
    py: Python<'_>,
    cone: &PySimpleCone,
    shift: Vec<f64>,
    s: Vec<Complex64>,
    p: f64,
    tolerance: f64,
) -> PyResult<Py<PyAny>> {
    let r = macdonald::verify_cone_reciprocity(&cone.inner, &shift, &ComplexPoint::new(s), &config(p)?, tolerance)
        .map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (polytope, n_points = 100, seed = 0))]
fn brianchon_gram(py: Python<'_>, polytope: &PyPolytope, n_points: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let (r, _) = macdonald::brianchon_gram_check(&polytope.inner, n_points, seed).map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (polytope, p = 2.0, tolerance = ZERO_TOLERANCE))]
fn conjecture(py: Python<'_>, polytope: &PyPolytope, p: f64, tolerance: f64) -> PyResult<Py<PyAny>> {
    let r = macdonald::conjecture_check(&polytope.inner, &config(p)?, &LimitConfig::default(), tolerance)
        .map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (t_values = vec![0.5, 1.0, 1.5], p = 2.0))]
fn triangle_example(py: Python<'_>, t_values: Vec<f64>, p: f64) -> PyResult<Py<PyAny>> {
    let r = macdonald::triangle_example(&t_values, &config(p)?, &LimitConfig::default()).map_err(py_err)?;
    to_dict(py, &r.to_json())
}

#[pymodule]
fn solidsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolidsumError", m.py().get_type::<SolidsumError>())?;
    m.add_class::<PyPolytope>()?;
    m.add_class::<PySimpleCone>()?;
    m.add_function(wrap_pyfunction!(solid_angle_exact, m)?)?;
    m.add_function(wrap_pyfunction!(solid_angle_mc, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_cone, m)?)?;
    m.add_function(wrap_pyfunction!(a_of_t_s, m)?)?;
    m.add_function(wrap_pyfunction!(a_of_t, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_a_t, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(verify_brion, m)?)?;
    m.add_function(wrap_pyfunction!(verify_macdonald, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cone_reciprocity, m)?)?;
    m.add_function(wrap_pyfunction!(brianchon_gram, m)?)?;
    m.add_function(wrap_pyfunction!(conjecture, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_example, m)?)?;
    Ok(())
}
