//! Python bindings. Specs are passed as the same strings the CLI accepts;
//! structured results come back as plain dicts and lists.

use std::str::FromStr;

use copreli::ordering::{default_grid, infer_ordering_with, st_soundness_slack, verify_theorem1_with};
use copreli::table1::{default_samples, table1_report};
use copreli::{CopulaSpec, Coupling, MarginalModel, Measure, SystemPair, SystemSpec};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

create_exception!(copreli, NumericalError, PyArithmeticError, "Evaluation failed at a finite time t.");

fn py_err(e: copreli::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse<T: FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| PyValueError::new_err(e.to_string()))
}

/// Serialises through JSON so every result type maps onto Python builtins.
fn to_py<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyModule::import(py, "json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(frozen, name = "Copula", module = "copreli")]
struct PyCopula(CopulaSpec);

#[pymethods]
impl PyCopula {
    /// `Copula("clayton:alpha=2")`; parameters are validated eagerly.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let c: CopulaSpec = parse(spec)?;
        c.validate().map_err(py_err)?;
        Ok(PyCopula(c))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn family(&self) -> String {
        self.0.kind().to_string()
    }

    #[getter]
    fn radially_symmetric(&self) -> bool {
        self.0.radially_symmetric()
    }

    fn value(&self, u: Vec<f64>) -> PyResult<f64> {
        self.0.value(&u).map_err(py_err)
    }

    /// Survival copula at the marginal survival probabilities.
    fn survival_value(&self, uhat: Vec<f64>) -> PyResult<f64> {
        self.0.survival_value(&uhat).map_err(py_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Copula('{}')", self.0)
    }
}

#[pyclass(frozen, name = "Marginal", module = "copreli")]
struct PyMarginal(MarginalModel);

#[pymethods]
impl PyMarginal {
    /// `Marginal("exp:1")` or `Marginal("weibull:1,2")`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyMarginal(parse(spec)?))
    }

    fn sf(&self, t: f64) -> PyResult<f64> {
        self.0.sf(t).map_err(py_err)
    }

    fn cdf(&self, t: f64) -> PyResult<f64> {
        self.0.cdf(t).map_err(py_err)
    }

    fn pdf(&self, t: f64) -> PyResult<f64> {
        self.0.pdf(t).map_err(py_err)
    }

    fn hazard(&self, t: f64) -> PyResult<f64> {
        self.0.hazard(t).map_err(py_err)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        self.0.quantile(p).map_err(py_err)
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Marginal('{}')", self.0)
    }
}

fn models(marginals: &[PyRef<'_, PyMarginal>]) -> Vec<MarginalModel> {
    marginals.iter().map(|m| m.0).collect()
}

#[pyclass(frozen, name = "System", module = "copreli")]
struct PySystem(SystemSpec);

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (copula, marginals, structure = "series", mode = "dependent", coupling = "distribution"))]
    fn new(
        copula: &PyCopula,
        marginals: Vec<PyRef<'_, PyMarginal>>,
        structure: &str,
        mode: &str,
        coupling: &str,
    ) -> PyResult<Self> {
        let spec = SystemSpec::new(copula.0.clone(), models(&marginals), parse(structure)?, parse(mode)?)
            .map_err(py_err)?
            .with_coupling(parse(coupling)?);
        Ok(PySystem(spec))
    }

    fn sf(&self, t: f64) -> PyResult<f64> {
        self.0.sf(t).map_err(py_err)
    }

    fn cdf(&self, t: f64) -> PyResult<f64> {
        self.0.cdf(t).map_err(py_err)
    }

    fn hazard(&self, t: f64) -> PyResult<f64> {
        self.0.hazard(t).map_err(py_err)
    }

    fn reversed_hazard(&self, t: f64) -> PyResult<f64> {
        self.0.reversed_hazard(t).map_err(py_err)
    }

    fn mrl(&self, t: f64) -> PyResult<f64> {
        self.0.mrl(t).map_err(py_err)
    }

    fn aging_intensity(&self, t: f64) -> PyResult<f64> {
        self.0.ai(t).map_err(py_err)
    }

    /// Columns `grid, sf, hr, rhr, mrl, ai` (None where undefined) plus `issues`.
    fn curve(&self, py: Python<'_>, grid: Vec<f64>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.reliability_curve(&grid).map_err(py_err)?)
    }
}

fn grid_or_default(grid: Option<Vec<f64>>, marginals: &[MarginalModel]) -> PyResult<Vec<f64>> {
    match grid {
        Some(g) => Ok(g),
        None => default_grid(marginals).map_err(py_err),
    }
}

/// Dependent-minus-independent error of one measure over a grid.
#[pyfunction]
#[pyo3(signature = (copula, marginals, structure, measure, grid, coupling = "distribution"))]
fn error_report(
    py: Python<'_>,
    copula: &PyCopula,
    marginals: Vec<PyRef<'_, PyMarginal>>,
    structure: &str,
    measure: &str,
    grid: Vec<f64>,
    coupling: &str,
) -> PyResult<Py<PyAny>> {
    let pair = SystemPair::new(copula.0.clone(), models(&marginals), parse(structure)?)
        .map_err(py_err)?
        .with_coupling(parse(coupling)?);
    let measure: Measure = parse(measure)?;
    to_py(py, &pair.report(measure, &grid).map_err(py_err)?)
}

/// Certified ordering of the dependent against the independent system, with
/// the worst survival gap behind any `st` claim under `st_slack`.
#[pyfunction]
#[pyo3(signature = (copula, marginals, structure, coupling = "distribution", grid = None))]
fn infer_ordering(
    py: Python<'_>,
    copula: &PyCopula,
    marginals: Vec<PyRef<'_, PyMarginal>>,
    structure: &str,
    coupling: &str,
    grid: Option<Vec<f64>>,
) -> PyResult<Py<PyAny>> {
    let m = models(&marginals);
    let grid = grid_or_default(grid, &m)?;
    let coupling: Coupling = parse(coupling)?;
    let v = infer_ordering_with(&copula.0, &m, parse(structure)?, coupling, &grid).map_err(py_err)?;
    let slack = st_soundness_slack(&v, &copula.0, &m, coupling).map_err(py_err)?;
    let out = to_py(py, &v)?;
    out.bind(py).set_item("statement", v.statement())?;
    out.bind(py).set_item("st_slack", slack)?;
    Ok(out)
}

/// Parallel-versus-series survival inequalities on a grid.
#[pyfunction]
#[pyo3(signature = (copula, marginals, coupling = "distribution", grid = None))]
fn verify_survival_inequalities(
    py: Python<'_>,
    copula: &PyCopula,
    marginals: Vec<PyRef<'_, PyMarginal>>,
    coupling: &str,
    grid: Option<Vec<f64>>,
) -> PyResult<Py<PyAny>> {
    let m = models(&marginals);
    let grid = grid_or_default(grid, &m)?;
    to_py(py, &verify_theorem1_with(&copula.0, &m, parse(coupling)?, &grid).map_err(py_err)?)
}

/// Ratio monotonicity per family; the built-in parameter samples when `copulas` is None.
#[pyfunction]
#[pyo3(signature = (marginals = None, copulas = None, coupling = "distribution"))]
fn table1(
    py: Python<'_>,
    marginals: Option<Vec<PyRef<'_, PyMarginal>>>,
    copulas: Option<Vec<PyRef<'_, PyCopula>>>,
    coupling: &str,
) -> PyResult<Py<PyAny>> {
    let m = match marginals {
        Some(m) => models(&m),
        None => vec![MarginalModel::exponential(1.0).map_err(py_err)?; 2],
    };
    let samples = match copulas {
        Some(cs) => cs.iter().map(|c| c.0.clone()).collect(),
        None => default_samples(),
    };
    to_py(py, &table1_report(&m, &samples, parse(coupling)?).map_err(py_err)?)
}

/// `n` draws of a bivariate lifetime as `(t1, t2)` tuples; fixed by `seed`.
#[pyfunction]
#[pyo3(signature = (copula, marginals, n, seed = 0, coupling = "distribution"))]
fn sample(
    copula: &PyCopula,
    marginals: Vec<PyRef<'_, PyMarginal>>,
    n: usize,
    seed: u64,
    coupling: &str,
) -> PyResult<Vec<(f64, f64)>> {
    let batch = copreli::oracle::sample_bivariate(&copula.0, &models(&marginals), n, seed, parse(coupling)?)
        .map_err(py_err)?;
    Ok(batch.pairs.iter().map(|p| (p[0], p[1])).collect())
}

#[pyfunction(name = "default_grid")]
fn py_default_grid(marginals: Vec<PyRef<'_, PyMarginal>>) -> PyResult<Vec<f64>> {
    default_grid(&models(&marginals)).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "copreli")]
pub fn copreli_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyCopula>()?;
    m.add_class::<PyMarginal>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(error_report, m)?)?;
    m.add_function(wrap_pyfunction!(infer_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(verify_survival_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(py_default_grid, m)?)?;
    Ok(())
}
