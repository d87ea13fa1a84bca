//! JSON wire format for tables, gauge operators, forms, automorphisms and
//! chart specs. Every coefficient is a literal string in the shared grammar,
//! so no floats appear. Output ordering follows the sorted internal maps,
//! which makes serialize → parse → serialize byte-identical.

use crate::algebra::form::{parse_wedge_key, BaseForm};
use crate::algebra::literal::{coord_index, parse_poly, parse_series, LiteralError};
use crate::algebra::poly::{coord_name, Mono};
use crate::algebra::series::TSeries;
use crate::chart::ChartSpec;
use crate::darboux::FormalAutomorphism;
use crate::engine::StarProduct;
use crate::error::EngineError;
use crate::geometry::ChristoffelData;
use crate::hochschild::{DiffSeries, MultiDiffOp};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerialError {
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("schema: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for SerialError {
    fn from(e: serde_json::Error) -> Self {
        SerialError::Json(e.to_string())
    }
}

impl From<EngineError> for SerialError {
    fn from(e: EngineError) -> Self {
        SerialError::Schema(e.to_string())
    }
}

fn schema<T>(msg: impl Into<String>) -> Result<T, SerialError> {
    Err(SerialError::Schema(msg.into()))
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    n: usize,
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    method: Option<String>,
    arity: usize,
    /// Per power of `t`: entries `[α_1, …, α_arity, "coefficient"]`.
    table: Vec<Vec<Value>>,
}

fn op_entries(op: &MultiDiffOp) -> Vec<Value> {
    op.terms()
        .map(|(idx, c)| {
            let mut e: Vec<Value> = idx
                .iter()
                .map(|a| Value::Array(a.iter().map(|&v| Value::from(v)).collect()))
                .collect();
            e.push(Value::String(c.to_literal()));
            Value::Array(e)
        })
        .collect()
}

fn parse_mono(v: &Value, n: usize) -> Result<Mono, SerialError> {
    let arr = v
        .as_array()
        .ok_or_else(|| SerialError::Schema("multi-index must be an array".into()))?;
    if arr.len() != 2 * n {
        return schema(format!(
            "multi-index length {} differs from {}",
            arr.len(),
            2 * n
        ));
    }
    arr.iter()
        .map(|x| {
            x.as_u64()
                .and_then(|u| u32::try_from(u).ok())
                .ok_or_else(|| {
                    SerialError::Schema("multi-index entries must be non-negative integers".into())
                })
        })
        .collect()
}

fn parse_op(entries: &[Value], n: usize, arity: usize) -> Result<MultiDiffOp, SerialError> {
    let mut op = MultiDiffOp::zero(n, arity);
    for e in entries {
        let arr = e
            .as_array()
            .ok_or_else(|| SerialError::Schema("table entry must be an array".into()))?;
        if arr.len() != arity + 1 {
            return schema(format!(
                "table entry has {} fields, expected {}",
                arr.len(),
                arity + 1
            ));
        }
        let idx = arr[..arity]
            .iter()
            .map(|v| parse_mono(v, n))
            .collect::<Result<Vec<_>, _>>()?;
        let lit = arr[arity]
            .as_str()
            .ok_or_else(|| SerialError::Schema("coefficient must be a string literal".into()))?;
        op.add_term(idx, &parse_poly(lit, n)?);
    }
    Ok(op)
}

fn series_to_json(d: &DiffSeries, method: Option<&str>) -> TableJson {
    TableJson {
        n: d.n(),
        order: d.order(),
        method: method.map(str::to_string),
        arity: d.arity(),
        table: d.parts().iter().map(op_entries).collect(),
    }
}

fn series_from_json(j: &TableJson) -> Result<DiffSeries, SerialError> {
    if j.table.len() != j.order + 1 {
        return schema(format!(
            "table has {} powers, expected {}",
            j.table.len(),
            j.order + 1
        ));
    }
    let parts = j
        .table
        .iter()
        .map(|p| parse_op(p, j.n, j.arity))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiffSeries::from_parts(j.n, j.order, j.arity, parts))
}

fn to_text<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn star_product_value(mu: &StarProduct) -> Value {
    serde_json::to_value(series_to_json(mu.table(), Some(mu.method()))).expect("serializable")
}

pub fn star_product_to_json(mu: &StarProduct) -> String {
    to_text(&series_to_json(mu.table(), Some(mu.method())))
}

pub fn star_product_from_json(text: &str) -> Result<StarProduct, SerialError> {
    let j: TableJson = serde_json::from_str(text)?;
    if j.arity != 2 {
        return schema("a star-product table has arity 2");
    }
    let t = series_from_json(&j)?;
    Ok(StarProduct::from_table(
        t,
        j.method.unwrap_or_else(|| "table".into()),
    ))
}

/// Gauge operators and other operator series; same layout without `method`.
pub fn diff_series_value(d: &DiffSeries) -> Value {
    serde_json::to_value(series_to_json(d, None)).expect("serializable")
}

pub fn diff_series_to_json(d: &DiffSeries) -> String {
    to_text(&series_to_json(d, None))
}

pub fn diff_series_from_json(text: &str) -> Result<DiffSeries, SerialError> {
    let j: TableJson = serde_json::from_str(text)?;
    series_from_json(&j)
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    n: usize,
    arity: usize,
    terms: Vec<Value>,
}

pub fn multi_diff_op_value(op: &MultiDiffOp) -> Value {
    serde_json::to_value(OpJson {
        n: op.n(),
        arity: op.arity(),
        terms: op_entries(op),
    })
    .expect("serializable")
}

pub fn multi_diff_op_to_json(op: &MultiDiffOp) -> String {
    to_text(&multi_diff_op_value(op))
}

pub fn multi_diff_op_from_json(text: &str) -> Result<MultiDiffOp, SerialError> {
    let j: OpJson = serde_json::from_str(text)?;
    parse_op(&j.terms, j.n, j.arity)
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    order: usize,
    /// `[wedge key, coefficient]` pairs such as `["dx1^dy1", "-1"]`.
    terms: Vec<(String, String)>,
}

pub fn form_value(a: &BaseForm) -> Value {
    serde_json::to_value(FormJson {
        n: a.n(),
        order: a.order(),
        terms: a.to_entries(),
    })
    .expect("serializable")
}

pub fn form_to_json(a: &BaseForm) -> String {
    to_text(&form_value(a))
}

pub fn form_from_json(text: &str) -> Result<BaseForm, SerialError> {
    let j: FormJson = serde_json::from_str(text)?;
    let mut out = BaseForm::zero(j.n, j.order);
    for (key, lit) in &j.terms {
        let w = parse_wedge_key(j.n, key)
            .ok_or_else(|| SerialError::Schema(format!("bad wedge key `{}`", key)))?;
        out.add_term(w, &parse_series(lit, j.n, j.order)?);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct AutomorphismJson {
    n: usize,
    order: usize,
    /// `[coordinate, image]` pairs in coordinate order.
    substitution: Vec<(String, String)>,
}

pub fn automorphism_value(phi: &FormalAutomorphism) -> Value {
    let n = phi.n();
    serde_json::to_value(AutomorphismJson {
        n,
        order: phi.order(),
        substitution: phi
            .substitution()
            .iter()
            .enumerate()
            .map(|(j, s)| (coord_name(n, j), s.to_literal()))
            .collect(),
    })
    .expect("serializable")
}

pub fn automorphism_to_json(phi: &FormalAutomorphism) -> String {
    to_text(&automorphism_value(phi))
}

pub fn automorphism_from_json(text: &str) -> Result<FormalAutomorphism, SerialError> {
    let j: AutomorphismJson = serde_json::from_str(text)?;
    let mut subs: Vec<Option<TSeries>> = vec![None; 2 * j.n];
    for (name, lit) in &j.substitution {
        let k = coord_index(name, j.n)
            .ok_or_else(|| SerialError::Schema(format!("unknown coordinate `{}`", name)))?;
        subs[k] = Some(parse_series(lit, j.n, j.order)?);
    }
    let subs = subs
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            s.ok_or_else(|| SerialError::Schema(format!("missing image of {}", coord_name(j.n, k))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FormalAutomorphism::new(subs)?)
}

#[derive(Serialize, Deserialize)]
struct ChartJson {
    n: usize,
    order: usize,
    #[serde(default)]
    omega_potential: Vec<String>,
    /// `[i, j, k, "Γ^k_ij"]` with 0-based indices, `x` first.
    #[serde(default)]
    christoffel: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    bindings: BTreeMap<String, String>,
}

pub fn chart_to_json(c: &ChartSpec) -> String {
    to_text(&ChartJson {
        n: c.n,
        order: c.order,
        omega_potential: c.potential.iter().map(TSeries::to_literal).collect(),
        christoffel: c
            .christoffel
            .entries()
            .map(|(&(i, j, k), v)| (i, j, k, v.to_literal()))
            .collect(),
        bindings: c
            .bindings
            .iter()
            .map(|(k, v)| (k.clone(), v.to_literal()))
            .collect(),
    })
}

pub fn chart_from_json(text: &str) -> Result<ChartSpec, SerialError> {
    let j: ChartJson = serde_json::from_str(text)?;
    let n = j.n;
    if n == 0 {
        return schema("n must be positive");
    }
    let potential = if j.omega_potential.is_empty() {
        vec![TSeries::zero(n, j.order); n]
    } else if j.omega_potential.len() == n {
        j.omega_potential
            .iter()
            .map(|s| parse_series(s, n, j.order))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        return schema(format!("omega_potential needs {} entries", n));
    };
    let mut christoffel = ChristoffelData::flat(n, j.order);
    for (i, jj, k, lit) in &j.christoffel {
        if *i >= 2 * n || *jj >= 2 * n || *k >= 2 * n {
            return schema(format!(
                "christoffel index ({}, {}, {}) out of range",
                i, jj, k
            ));
        }
        christoffel.set(*i, *jj, *k, parse_series(lit, n, j.order)?);
    }
    let bindings = j
        .bindings
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_series(v, n, j.order)?)))
        .collect::<Result<BTreeMap<_, _>, SerialError>>()?;
    Ok(ChartSpec {
        n,
        order: j.order,
        potential,
        christoffel,
        bindings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::Scalar;

    #[test]
    fn star_table_round_trip() {
        let mu = StarProduct::moyal_weyl(2, 2);
        let s = star_product_to_json(&mu);
        let back = star_product_from_json(&s).unwrap();
        assert_eq!(back.table(), mu.table());
        assert_eq!(star_product_to_json(&back), s);
    }

    #[test]
    fn gauge_round_trip() {
        let d = DiffSeries::exp_laplacian(1, 3, &Scalar::frac(-1, 2));
        let s = diff_series_to_json(&d);
        assert_eq!(diff_series_to_json(&diff_series_from_json(&s).unwrap()), s);
    }

    #[test]
    fn form_and_automorphism_round_trip() {
        let mut c = ChartSpec::standard(1, 2);
        c.potential = vec![parse_series("x^2*y", 1, 2).unwrap()];
        let f = form_to_json(&c.omega_t());
        assert_eq!(form_to_json(&form_from_json(&f).unwrap()), f);
        let a = automorphism_to_json(&c.normalizing_map());
        assert_eq!(
            automorphism_to_json(&automorphism_from_json(&a).unwrap()),
            a
        );
    }

    #[test]
    fn chart_round_trip_and_errors() {
        let text = r#"{"n": 1, "order": 2, "omega_potential": ["x*y"],
            "christoffel": [[0, 0, 0, "y"]], "bindings": {"f": "x + t*y"}}"#;
        let c = chart_from_json(text).unwrap();
        let s = chart_to_json(&c);
        assert_eq!(chart_to_json(&chart_from_json(&s).unwrap()), s);
        assert!(matches!(chart_from_json("{"), Err(SerialError::Json(_))));
        let bad = r#"{"n": 1, "order": 2, "omega_potential": ["x*"]}"#;
        assert!(matches!(chart_from_json(bad), Err(SerialError::Literal(_))));
    }
}
