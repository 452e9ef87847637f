//! Python bindings. Vectors and matrices cross the boundary as lists of floats
//! (matrices as lists of rows).

use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use radial_gauge::verify::{matrix_rows, radial_gauge_check, radial_residual};
use radial_gauge::{
    curve_transport, expr, make_builtin, polar_transport, pullback_transport, radial_frame,
    radial_section_grid, radial_transport, run_suite, BuiltinParams, BundleSpec, ConnectionField,
    Domain, Error, IntegratorConfig, Method, Metric, SuiteConfig,
};

fn to_py(e: Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    matrix_rows(m)
}

/// A connection on the trivial bundle `D × R^k` over a box `D ⊂ R^n`.
#[pyclass(name = "Connection", module = "radial_gauge_py", frozen)]
pub struct PyConnection {
    inner: ConnectionField,
}

#[pymethods]
impl PyConnection {
    /// Named family: flat, constant, abelian_poly, sphere_levicivita, rotation.
    #[staticmethod]
    #[pyo3(signature = (name, k, lower, upper, *, matrices=None, exprs=None, omega=None, radius=None))]
    #[allow(clippy::too_many_arguments)]
    fn builtin(
        name: &str,
        k: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        matrices: Option<Vec<Vec<Vec<f64>>>>,
        exprs: Option<Vec<String>>,
        omega: Option<f64>,
        radius: Option<f64>,
    ) -> PyResult<Self> {
        let n = lower.len();
        let domain = Domain::new(lower, upper).map_err(to_py)?;
        let params = BuiltinParams {
            matrices,
            exprs,
            omega,
            radius,
        };
        let inner = make_builtin(name, n, k, domain, &params).map_err(to_py)?;
        Ok(PyConnection { inner })
    }

    /// Coefficients given as strings indexed `[i][s][j]`; `metric` is an
    /// optional `k × k` array of strings.
    #[staticmethod]
    #[pyo3(signature = (lower, upper, expressions, metric=None))]
    fn from_expressions(
        lower: Vec<f64>,
        upper: Vec<f64>,
        expressions: Vec<Vec<Vec<String>>>,
        metric: Option<Vec<Vec<String>>>,
    ) -> PyResult<Self> {
        let n = lower.len();
        let k = expressions.first().map_or(0, |m| m.len());
        let domain = Domain::new(lower, upper).map_err(to_py)?;
        let spec = BundleSpec::new(n, k, domain).map_err(to_py)?;
        let mut inner = ConnectionField::from_expressions(spec, &expressions).map_err(to_py)?;
        if let Some(rows) = metric {
            let parsed = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| {
                            expr::parse(s, n).map_err(|e| PyValueError::new_err(e.to_string()))
                        })
                        .collect::<PyResult<Vec<_>>>()
                })
                .collect::<PyResult<Vec<_>>>()?;
            inner = inner
                .with_metric(Metric::Expressions(parsed))
                .map_err(to_py)?;
        }
        Ok(PyConnection { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    fn coefficients(&self, z: Vec<f64>) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let mats = self.inner.coefficients_at(&z).map_err(to_py)?;
        Ok(mats.iter().map(rows).collect())
    }

    /// `F_ij(z)` with 0-based axes.
    #[pyo3(signature = (z, i, j, h=None))]
    fn curvature(
        &self,
        z: Vec<f64>,
        i: usize,
        j: usize,
        h: Option<f64>,
    ) -> PyResult<Vec<Vec<f64>>> {
        let h = h.unwrap_or_else(|| self.inner.default_step());
        Ok(rows(&self.inner.curvature_at(&z, i, j, h).map_err(to_py)?))
    }

    fn metric(&self, z: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.inner.metric_at(&z).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Connection(family={}, n={}, k={})",
            self.inner.family().name(),
            self.inner.n(),
            self.inner.k()
        )
    }
}

#[pyclass(name = "Integrator", module = "radial_gauge_py", frozen)]
pub struct PyIntegrator {
    inner: IntegratorConfig,
}

#[pymethods]
impl PyIntegrator {
    #[new]
    #[pyo3(signature = (method="rk45", steps=256, atol=1e-12, rtol=1e-10, max_steps=1_000_000))]
    fn new(method: &str, steps: usize, atol: f64, rtol: f64, max_steps: usize) -> PyResult<Self> {
        let method = match method {
            "rk4" => Method::Rk4,
            "rk45" => Method::Rk45,
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let inner = IntegratorConfig {
            method,
            steps,
            atol,
            rtol,
            max_steps,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyIntegrator { inner })
    }

    #[getter]
    fn method(&self) -> &'static str {
        match self.inner.method {
            Method::Rk4 => "rk4",
            Method::Rk45 => "rk45",
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Integrator(method={:?}, steps={}, atol={:e}, rtol={:e}, max_steps={})",
            self.method(),
            self.inner.steps,
            self.inner.atol,
            self.inner.rtol,
            self.inner.max_steps
        )
    }
}

fn config(integrator: Option<&PyIntegrator>) -> IntegratorConfig {
    integrator.map_or_else(IntegratorConfig::default, |i| i.inner.clone())
}

/// Radial transport of `y0` to `z`: a dict with `y`, `error_estimate`, `steps`.
#[pyfunction]
#[pyo3(signature = (connection, z, y0, integrator=None))]
fn transport<'py>(
    py: Python<'py>,
    connection: &PyConnection,
    z: Vec<f64>,
    y0: Vec<f64>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Bound<'py, PyDict>> {
    let r =
        radial_transport(&connection.inner, &z, &vector(y0), &config(integrator)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("y", r.y_final.as_slice().to_vec())?;
    out.set_item("error_estimate", r.error_estimate)?;
    out.set_item("steps", r.steps)?;
    Ok(out)
}

/// Radially parallel frame at `z` (rows of `P(z)`).
#[pyfunction]
#[pyo3(signature = (connection, z, integrator=None))]
fn frame(
    connection: &PyConnection,
    z: Vec<f64>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<Vec<f64>>> {
    let p = radial_frame(&connection.inner, &z, &config(integrator)).map_err(to_py)?;
    Ok(rows(&p))
}

#[pyfunction]
#[pyo3(signature = (connection, u, r, y0, integrator=None))]
fn polar(
    connection: &PyConnection,
    u: Vec<f64>,
    r: f64,
    y0: Vec<f64>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<f64>> {
    let y = polar_transport(&connection.inner, &u, r, &vector(y0), &config(integrator))
        .map_err(to_py)?;
    Ok(y.as_slice().to_vec())
}

#[pyfunction]
#[pyo3(signature = (connection, x, y0, integrator=None))]
fn pullback(
    connection: &PyConnection,
    x: Vec<f64>,
    y0: Vec<f64>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<f64>> {
    let y = pullback_transport(&connection.inner, &x, &vector(y0), &config(integrator))
        .map_err(to_py)?;
    Ok(y.as_slice().to_vec())
}

/// Transport along the polygon through `points`.
#[pyfunction]
#[pyo3(signature = (connection, points, y0, integrator=None))]
fn curve(
    connection: &PyConnection,
    points: Vec<Vec<f64>>,
    y0: Vec<f64>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<f64>> {
    let y = curve_transport(&connection.inner, &points, &vector(y0), &config(integrator))
        .map_err(to_py)?;
    Ok(y.as_slice().to_vec())
}

/// `ξ(z)` at every point, in the given order.
#[pyfunction]
#[pyo3(signature = (connection, y0, points, integrator=None))]
fn grid(
    connection: &PyConnection,
    y0: Vec<f64>,
    points: Vec<Vec<f64>>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<Vec<f64>>> {
    let samples = radial_section_grid(&connection.inner, &vector(y0), &points, &config(integrator))
        .map_err(to_py)?;
    Ok(samples
        .into_iter()
        .map(|s| s.xi.as_slice().to_vec())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (connection, z, y0, h=1e-4, integrator=None))]
fn residual(
    connection: &PyConnection,
    z: Vec<f64>,
    y0: Vec<f64>,
    h: f64,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Vec<f64>> {
    let r = radial_residual(&connection.inner, &z, &vector(y0), h, &config(integrator))
        .map_err(to_py)?;
    Ok(r.as_slice().to_vec())
}

/// Connection in the radial frame at `z`: a dict with `value`, `condition`,
/// `radial_combination`, `connection_in_frame`.
#[pyfunction]
#[pyo3(signature = (connection, z, h=1e-4, integrator=None))]
fn gauge<'py>(
    py: Python<'py>,
    connection: &PyConnection,
    z: Vec<f64>,
    h: f64,
    integrator: Option<&PyIntegrator>,
) -> PyResult<Bound<'py, PyDict>> {
    let g = radial_gauge_check(&connection.inner, &z, h, &config(integrator)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("value", g.value)?;
    out.set_item("condition", g.condition)?;
    out.set_item("radial_combination", rows(&g.radial_combination))?;
    out.set_item(
        "connection_in_frame",
        g.connection_in_frame.iter().map(rows).collect::<Vec<_>>(),
    )?;
    Ok(out)
}

/// Runs the verification suite; `suite` is a JSON object with the same keys
/// as the `checks` block of a run configuration. Returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (connection, y0, suite=None, integrator=None))]
fn check(
    connection: &PyConnection,
    y0: Vec<f64>,
    suite: Option<&str>,
    integrator: Option<&PyIntegrator>,
) -> PyResult<String> {
    let suite: SuiteConfig = match suite {
        Some(text) => {
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("suite: {e}")))?
        }
        None => SuiteConfig::default(),
    };
    let report = run_suite(&connection.inner, &vector(y0), &suite, &config(integrator));
    Ok(report.to_json())
}

/// Indented tree of a parsed expression over `n` variables.
#[pyfunction]
#[pyo3(signature = (source, n=1))]
fn parse_tree(source: &str, n: usize) -> PyResult<String> {
    expr::parse(source, n)
        .map(|e| e.tree())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn evaluate(source: &str, point: Vec<f64>) -> PyResult<f64> {
    let e = expr::parse(source, point.len()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    e.eval(&point)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn radial_gauge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConnection>()?;
    m.add_class::<PyIntegrator>()?;
    m.add_function(wrap_pyfunction!(transport, m)?)?;
    m.add_function(wrap_pyfunction!(frame, m)?)?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(gauge, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(parse_tree, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
