//! Python bindings. Charts, tables, forms and automorphisms cross the
//! boundary as the same JSON documents the command line reads and writes.

use fedosov::chart::{ChartSpec, Method};
use fedosov::checks::Check;
use fedosov::darboux::{characteristic_form as char_form, trivialize_pair};
use fedosov::engine::StarProduct;
use fedosov::hochschild::{equivalence_search, Equivalence};
use fedosov::serial;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn chart(spec_json: &str, order: Option<usize>) -> PyResult<ChartSpec> {
    let spec = serial::chart_from_json(spec_json).map_err(value_error)?;
    Ok(match order {
        Some(o) => spec.with_order(o),
        None => spec,
    })
}

fn method(name: &str) -> PyResult<Method> {
    Method::parse(name).ok_or_else(|| value_error(format!("unknown method `{}`", name)))
}

/// A method name, or a serialized table truncated to the chart's order.
fn product(spec: &ChartSpec, source: &str) -> PyResult<StarProduct> {
    if let Some(m) = Method::parse(source) {
        return spec.star_product(m).map_err(value_error);
    }
    let mu = serial::star_product_from_json(source).map_err(value_error)?;
    if mu.n() != spec.n || mu.order() < spec.order {
        return Err(value_error("table does not fit the chart"));
    }
    Ok(mu.truncated(spec.order))
}

/// The star-product table of `method` on the chart, as JSON.
#[pyfunction]
#[pyo3(signature = (spec_json, method_name = "fedosov", order = None))]
fn star_product(spec_json: &str, method_name: &str, order: Option<usize>) -> PyResult<String> {
    let spec = chart(spec_json, order)?;
    let mu = spec
        .star_product(method(method_name)?)
        .map_err(value_error)?;
    Ok(serial::star_product_to_json(&mu))
}

/// `(passed, omega_t, trace, omega_wick, omega_weyl)` with forms as JSON.
#[pyfunction]
#[pyo3(signature = (spec_json, order = None))]
fn curvature(
    spec_json: &str,
    order: Option<usize>,
) -> PyResult<(bool, String, String, String, String)> {
    let rep = chart(spec_json, order)?
        .curvature_report()
        .map_err(value_error)?;
    Ok((
        rep.all_passed(),
        serial::form_to_json(&rep.omega_t),
        serial::form_to_json(&rep.trace_form),
        serial::form_to_json(&rep.omega_wick),
        serial::form_to_json(&rep.omega_weyl),
    ))
}

/// Runs the named checks; one `(name, passed, witness)` per check.
#[pyfunction]
#[pyo3(signature = (spec_json, source, checks, degree = 3, order = None))]
fn check(
    spec_json: &str,
    source: &str,
    checks: Vec<String>,
    degree: u32,
    order: Option<usize>,
) -> PyResult<Vec<(String, bool, Option<String>)>> {
    let spec = chart(spec_json, order)?;
    let mu = product(&spec, source)?;
    checks
        .iter()
        .map(|name| {
            let c = Check::parse(name)
                .ok_or_else(|| value_error(format!("unknown check `{}`", name)))?;
            let out = c.run(&mu, degree);
            Ok((c.name().to_string(), out.passed, out.witness))
        })
        .collect()
}

/// The gauge carrying `source` to `target` as JSON, or `None` with the order
/// of the first obstruction.
#[pyfunction]
#[pyo3(signature = (spec_json, source, target, identical_on_o = false, order = None))]
fn equivalence(
    spec_json: &str,
    source: &str,
    target: &str,
    identical_on_o: bool,
    order: Option<usize>,
) -> PyResult<(Option<String>, Option<usize>)> {
    let spec = chart(spec_json, order)?;
    let a = product(&spec, source)?;
    let b = product(&spec, target)?;
    match equivalence_search(&a, &b, identical_on_o).map_err(value_error)? {
        Equivalence::Found(d) => Ok((Some(serial::diff_series_to_json(&d)), None)),
        Equivalence::Obstruction { order, .. } => Ok((None, Some(order))),
    }
}

/// The characteristic form of a polarized product, one order below it.
#[pyfunction]
#[pyo3(signature = (spec_json, source = "fedosov", order = None))]
fn characteristic_form(spec_json: &str, source: &str, order: Option<usize>) -> PyResult<String> {
    let spec = chart(spec_json, order)?;
    let mu = product(&spec, source)?;
    let (omega, _) = char_form(&mu).map_err(value_error)?;
    Ok(serial::form_to_json(&omega))
}

/// The `O`-preserving automorphism pulling the chart form back to the
/// standard one, as JSON.
#[pyfunction]
#[pyo3(signature = (spec_json, order = None))]
fn trivialize(spec_json: &str, order: Option<usize>) -> PyResult<String> {
    let spec = chart(spec_json, order)?;
    let a = trivialize_pair(&spec.omega_t()).map_err(value_error)?;
    Ok(serial::automorphism_to_json(&a))
}

#[pymodule]
fn fedosov_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(star_product, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_form, m)?)?;
    m.add_function(wrap_pyfunction!(trivialize, m)?)?;
    Ok(())
}
