//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers (floats are accepted on input).

use matfn::cli::params_io;
use matfn::fraccalc::{self, FracOrder};
use matfn::gammakit::{self, BetaPath};
use matfn::integralrep;
use matfn::matcore::CMatrix;
use matfn::relations::{self, HypothesisMode, IdentityKind};
use matfn::series::{self, SeriesOptions};
use matfn::special;
use matfn::Error;
use num_complex::Complex64 as C64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pymatfn, MatfnError, PyException);
create_exception!(pymatfn, DomainError, MatfnError);
create_exception!(pymatfn, PreconditionError, MatfnError);
create_exception!(pymatfn, NumericError, MatfnError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Precondition(_) => PreconditionError::new_err(msg),
        Error::Numeric(_) | Error::Accuracy(_) | Error::Eigen(_) => NumericError::new_err(msg),
        Error::Dimension(_) | Error::InvalidArgument(_) => PyValueError::new_err(msg),
    }
}

type Rows = Vec<Vec<C64>>;

fn matrix(rows: Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(
            "expected a non-empty square list of rows",
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn options(tol: f64, max_terms: usize) -> SeriesOptions {
    SeriesOptions {
        rel_tol: tol,
        max_terms,
        ..SeriesOptions::default()
    }
}

fn mode(probe: bool) -> HypothesisMode {
    if probe {
        HypothesisMode::Probe
    } else {
        HypothesisMode::Strict
    }
}

/// Parameters `A, B, C_1..C_p, D_1..D_q`, all of one size.
#[pyclass(name = "ParameterSet", frozen)]
struct PyParams(series::ParameterSet);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (a, b, c = Vec::new(), d = Vec::new()))]
    fn new(a: Rows, b: Rows, c: Vec<Rows>, d: Vec<Rows>) -> PyResult<Self> {
        let c = c.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let d = d.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        series::ParameterSet::new(matrix(a)?, matrix(b)?, c, d)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        params_io::parse_params_str(text)
            .map(Self)
            .map_err(PyValueError::new_err)
    }

    fn to_json(&self) -> String {
        params_io::params_to_json(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn p(&self) -> usize {
        self.0.p()
    }

    #[getter]
    fn q(&self) -> usize {
        self.0.q()
    }

    #[getter]
    fn a(&self) -> Rows {
        rows(&self.0.a)
    }

    #[getter]
    fn b(&self) -> Rows {
        rows(&self.0.b)
    }

    fn __repr__(&self) -> String {
        format!(
            "ParameterSet(dim={}, p={}, q={})",
            self.0.dim(),
            self.0.p(),
            self.0.q()
        )
    }
}

/// Sums the series at `z`; returns a dict with the value and bookkeeping.
#[pyfunction]
#[pyo3(signature = (params, z, tol = 1e-12, max_terms = 500))]
fn eval<'py>(
    py: Python<'py>,
    params: &PyParams,
    z: C64,
    tol: f64,
    max_terms: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = series::eval(&params.0, z, &options(tol, max_terms)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("value", rows(&r.value))?;
    out.set_item("terms_used", r.terms_used)?;
    out.set_item("last_term_norm", r.last_term_norm)?;
    out.set_item("verdict", r.verdict.tag.to_string())?;
    out.set_item("terminated", r.terminated_polynomially)?;
    out.set_item("truncated", r.truncated)?;
    Ok(out)
}

/// `(verdict, margin)`; the margin is `None` unless `p = q + 2`.
#[pyfunction]
fn classify(params: &PyParams, z: C64) -> (String, Option<f64>) {
    let v = series::classify(&params.0, z);
    (v.tag.to_string(), v.margin)
}

#[pyfunction]
fn gamma(a: Rows) -> PyResult<Rows> {
    gammakit::gamma_m(&matrix(a)?)
        .map(|m| rows(&m))
        .map_err(to_py)
}

#[pyfunction]
fn rgamma(a: Rows) -> PyResult<Rows> {
    gammakit::rgamma_m(&matrix(a)?)
        .map(|m| rows(&m))
        .map_err(to_py)
}

#[pyfunction]
fn pochhammer(a: Rows, n: usize) -> PyResult<Rows> {
    Ok(rows(&gammakit::pochhammer(&matrix(a)?, n)))
}

/// `path` is `"gamma"` (requires `AB = BA`) or `"quadrature"`.
#[pyfunction]
#[pyo3(signature = (a, b, path = "gamma"))]
fn beta(a: Rows, b: Rows, path: &str) -> PyResult<Rows> {
    let path = match path {
        "gamma" => BetaPath::GammaProduct,
        "quadrature" => BetaPath::Quadrature,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown beta path '{other}'"
            )))
        }
    };
    gammakit::beta_m(&matrix(a)?, &matrix(b)?, path)
        .map(|m| rows(&m))
        .map_err(to_py)
}

/// Runs the named identity checks (comma list or `"all"`) and returns one
/// dict per check.
#[pyfunction]
#[pyo3(signature = (params, z, identities = "all", order = 1, probe = false, tol = 1e-12))]
fn verify<'py>(
    py: Python<'py>,
    params: &PyParams,
    z: C64,
    identities: &str,
    order: usize,
    probe: bool,
    tol: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kinds: Vec<IdentityKind> = if identities == "all" {
        IdentityKind::ALL.to_vec()
    } else {
        identities
            .split(',')
            .map(|s| {
                IdentityKind::parse(s.trim())
                    .ok_or_else(|| PyValueError::new_err(format!("unknown identity '{s}'")))
            })
            .collect::<PyResult<_>>()?
    };
    let reports =
        relations::run_suite(&params.0, z, &kinds, order, &options(tol, 500), mode(probe))
            .map_err(to_py)?;
    reports
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("identity", r.id.to_string())?;
            d.set_item("residual", r.residual)?;
            d.set_item("hypotheses_met", r.hypotheses_met)?;
            d.set_item("unmet", r.unmet)?;
            Ok(d)
        })
        .collect()
}

/// Integral representation at `z`, with node-doubling check.
#[pyfunction]
#[pyo3(signature = (params, z, nodes = 128, probe = false))]
fn integral<'py>(
    py: Python<'py>,
    params: &PyParams,
    z: C64,
    nodes: usize,
    probe: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let r = integralrep::eval_integral_with(
        &params.0,
        z,
        nodes,
        &SeriesOptions::default(),
        mode(probe),
    )
    .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("value", rows(&r.value))?;
    out.set_item("nodes_used", r.nodes_used)?;
    out.set_item("doubling_change", r.doubling_change)?;
    out.set_item("exact_weights", r.exact_weights)?;
    out.set_item("hypotheses_met", r.hypotheses_met)?;
    Ok(out)
}

/// Riemann-Liouville integral of `R(x) x^{D_j − I}` at `x > 0`.
#[pyfunction]
#[pyo3(signature = (params, mu, x, j = 1))]
fn frac_integral(params: &PyParams, mu: C64, x: f64, j: usize) -> PyResult<Rows> {
    let mu = FracOrder::new(mu).map_err(to_py)?;
    fraccalc::frac_integral(&params.0, j, mu, x, &SeriesOptions::default())
        .map(|m| rows(&m))
        .map_err(to_py)
}

/// Riemann-Liouville derivative of `R(x) x^{D_j − I}` at `x > 0`.
#[pyfunction]
#[pyo3(signature = (params, mu, x, j = 1))]
fn frac_derivative(params: &PyParams, mu: C64, x: f64, j: usize) -> PyResult<Rows> {
    let mu = FracOrder::new(mu).map_err(to_py)?;
    fraccalc::frac_derivative(&params.0, j, mu, x, &SeriesOptions::default())
        .map(|m| rows(&m))
        .map_err(to_py)
}

/// Named special function built from the fields of `params`.
#[pyfunction]
#[pyo3(signature = (name, params, x, degree = None, konhauser_k = 1))]
fn special_value(
    name: &str,
    params: &PyParams,
    x: C64,
    degree: Option<usize>,
    konhauser_k: u32,
) -> PyResult<Rows> {
    let form = special::build_named(name, &params.0, degree, konhauser_k).map_err(to_py)?;
    form.evaluate(x, &SeriesOptions::default())
        .map(|r| rows(&r.value))
        .map_err(to_py)
}

#[pymodule]
pub fn pymatfn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add("MatfnError", m.py().get_type::<MatfnError>())?;
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    m.add("SPECIAL_NAMES", special::NAMES.to_vec())?;
    m.add_function(wrap_pyfunction!(eval, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(rgamma, m)?)?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(integral, m)?)?;
    m.add_function(wrap_pyfunction!(frac_integral, m)?)?;
    m.add_function(wrap_pyfunction!(frac_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(special_value, m)?)?;
    Ok(())
}
