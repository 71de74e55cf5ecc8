use copreli_py::copreli_module;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module<R>(f: impl FnOnce(Python<'_>, &Bound<'_, PyModule>) -> PyResult<R>) -> R {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "copreli").unwrap();
        copreli_module(&m).unwrap();
        f(py, &m).unwrap()
    })
}

fn run(code: &str) {
    with_module(|py, m| {
        let globals = PyDict::new(py);
        globals.set_item("copreli", m)?;
        py.run(&std::ffi::CString::new(code).unwrap(), Some(&globals), None)
    })
}

#[test]
fn system_sf_matches_the_closed_form() {
    run(r#"
import math
c = copreli.Copula("fgm:alpha=0.5")
m = copreli.Marginal("exp:1")
s = copreli.System(c, [m, m], structure="series")
assert abs(s.sf(math.log(2)) - 0.28125) < 1e-12
assert abs(copreli.System(c, [m, m], mode="independent").sf(math.log(2)) - 0.25) < 1e-12
"#);
}

#[test]
fn errors_map_to_python_exceptions() {
    run(r#"
try:
    copreli.Copula("fgm:alpha=2")
    raise AssertionError("accepted")
except ValueError as e:
    assert "[-1, 1]" in str(e)
m = copreli.Marginal("exp:1")
try:
    copreli.System(copreli.Copula("clayton:alpha=2"), [m, m]).hazard(800.0)
    raise AssertionError("no error")
except copreli.NumericalError as e:
    assert isinstance(e, ArithmeticError)
"#);
}

#[test]
fn ordering_and_table_results_are_dicts() {
    run(r#"
m = copreli.Marginal("exp:1")
v = copreli.infer_ordering(copreli.Copula("amh:alpha=-0.5"), [m, m], "parallel")
assert v["relation"] == "rhr" and v["st_slack"] >= -1e-9
rows = copreli.table1(copulas=[copreli.Copula("gumbel_hougaard:alpha=2")])["rows"]
assert rows[0]["series"]["machine"] == "increasing"
assert len(copreli.default_grid([m, m])) == 64
"#);
}
