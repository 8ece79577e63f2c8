use std::collections::HashMap;

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cylnogo_core::parse::{parse_classical, parse_operator, parse_operator_expr, parse_scalar, SchemeContext};
use cylnogo_core::quant::{Bindings, QuantScheme, Rule, SchemeKind};
use cylnogo_core::subalgebra::{alpha_assignment, b_complex, closure, walpha_generators, Cutoff};
use cylnogo_core::verify::{report_json, run_checks, Manifest, VerifyError};
use cylnogo_core::{Param, Scalar};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scheme(name: &str, params: Option<HashMap<String, String>>, rules: Option<Vec<String>>) -> PyResult<QuantScheme> {
    let kind: SchemeKind = name.parse().map_err(value_err)?;
    let mut bindings = Bindings::new();
    for (key, value) in params.unwrap_or_default() {
        let p = Param::from_name(&key).ok_or_else(|| value_err(format!("unknown parameter `{key}`")))?;
        if value == "formal" {
            bindings.set_formal(p);
        } else {
            let c = parse_scalar(&value)
                .map_err(value_err)?
                .as_constant()
                .ok_or_else(|| value_err(format!("`{value}` is not an exact number")))?;
            bindings.set(p, Scalar::constant(c));
        }
    }
    let rules = rules
        .unwrap_or_default()
        .iter()
        .map(|r| r.parse::<Rule>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    QuantScheme::build(kind, bindings).with_rules(&rules).map_err(value_err)
}

/// Poisson bracket of two classical expressions, in canonical form.
#[pyfunction]
fn bracket(f: &str, g: &str) -> PyResult<String> {
    let f = parse_classical(f).map_err(value_err)?;
    let g = parse_classical(g).map_err(value_err)?;
    Ok(f.bracket(&g).to_string())
}

#[pyfunction]
#[pyo3(signature = (expr, scheme_name = "type-i", params = None, rules = None))]
fn quantize(
    expr: &str,
    scheme_name: &str,
    params: Option<HashMap<String, String>>,
    rules: Option<Vec<String>>,
) -> PyResult<String> {
    let s = scheme(scheme_name, params, rules)?;
    let f = parse_classical(expr).map_err(value_err)?;
    Ok(s.quantize(&f).map_err(value_err)?.to_string())
}

#[pyfunction]
fn commutator(a: &str, b: &str) -> PyResult<String> {
    let ctx = SchemeContext::default();
    let a = parse_operator(a, &ctx).map_err(value_err)?;
    let b = parse_operator(b, &ctx).map_err(value_err)?;
    Ok(a.try_commutator(&b).map_err(value_err)?.to_string())
}

/// `<bra|op|ket>` for an operator expression.
#[pyfunction]
fn matrix_element(op: &str, bra: i64, ket: i64) -> PyResult<String> {
    let x = parse_operator_expr(op, &SchemeContext::default()).map_err(value_err)?;
    Ok(x.matrix_element(bra, ket).map_err(value_err)?.to_string())
}

/// Dimension and pivot monomials of a bracket closure.
#[pyfunction]
#[pyo3(signature = (gens, max_deg, max_harm, alpha = None))]
fn closure_basis(gens: Vec<String>, max_deg: u32, max_harm: i64, alpha: Option<&str>) -> PyResult<(usize, Vec<String>)> {
    let gens = match gens.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["preset:B"] => b_complex(),
        ["preset:Walpha"] => walpha_generators(max_harm),
        _ => gens.iter().map(|g| parse_classical(g)).collect::<Result<_, _>>().map_err(value_err)?,
    };
    let assignment = match alpha {
        Some(a) => alpha_assignment(
            parse_scalar(a)
                .map_err(value_err)?
                .as_constant()
                .ok_or_else(|| value_err("alpha must be an exact number"))?,
        ),
        None => Default::default(),
    };
    let basis = closure(&gens, Cutoff::new(max_deg, max_harm), &assignment).map_err(value_err)?;
    Ok((basis.dim(), basis.pivots().iter().map(|m| m.to_string()).collect()))
}

/// Runs named checks (all by default) and returns the json report.
#[pyfunction]
#[pyo3(signature = (only = None, jobs = 1))]
fn verify(only: Option<Vec<String>>, jobs: usize) -> PyResult<String> {
    let manifest = Manifest::load().map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let results = run_checks(&manifest, &only.unwrap_or_default(), jobs).map_err(|e| match e {
        VerifyError::UnknownCheck(n) => PyKeyError::new_err(n),
        other => PyRuntimeError::new_err(other.to_string()),
    })?;
    Ok(report_json(&manifest, &results))
}

#[pymodule]
fn cylnogo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_element, m)?)?;
    m.add_function(wrap_pyfunction!(closure_basis, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
