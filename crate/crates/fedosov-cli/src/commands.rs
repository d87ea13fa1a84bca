//! Command implementations. Each one re-verifies what it emits.

use crate::report::{InputError, Report};
use fedosov::chart::{ChartSpec, Method};
use fedosov::checks::{check_associativity, check_psp, check_unit, check_wpsp, Check};
use fedosov::darboux::{
    characteristic_form, check_darboux, lift_darboux_seeded, trivialize_pair, DeformedBracket,
};
use fedosov::engine::StarProduct;
use fedosov::hochschild::{apply_gauge, equivalence_search, Equivalence};
use fedosov::serial;
use fedosov::{BaseForm, ChartPoly, TSeries};
use serde_json::{json, Value};
use std::path::Path;

pub type Outcome = Result<(Report, Option<String>), InputError>;

pub fn load_spec(path: &Path, order: Option<usize>) -> Result<ChartSpec, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    let spec = serial::chart_from_json(&text)
        .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    Ok(match order {
        Some(o) => spec.with_order(o),
        None => spec,
    })
}

/// A method name, or a path to a serialized table.
pub fn load_product(spec: &ChartSpec, source: &str) -> Result<StarProduct, InputError> {
    if let Some(m) = Method::parse(source) {
        return Ok(spec.star_product(m)?);
    }
    let text =
        std::fs::read_to_string(source).map_err(|e| InputError(format!("{}: {}", source, e)))?;
    let mu = serial::star_product_from_json(&text)
        .map_err(|e| InputError(format!("{}: {}", source, e)))?;
    if mu.n() != spec.n {
        return Err(InputError(format!(
            "{}: table has n = {}, chart has n = {}",
            source,
            mu.n(),
            spec.n
        )));
    }
    if mu.order() < spec.order {
        return Err(InputError(format!(
            "{}: table order {} is below the requested order {}",
            source,
            mu.order(),
            spec.order
        )));
    }
    Ok(mu.truncated(spec.order))
}

fn form_artifact(r: &mut Report, name: &str, a: &BaseForm) {
    r.artifact(name, serial::form_value(a), a.to_literal());
}

fn series_list(v: &[TSeries]) -> (Value, String) {
    let lits: Vec<String> = v.iter().map(TSeries::to_literal).collect();
    (json!(lits), lits.join("\n"))
}

pub fn star_product(spec: &ChartSpec, method: Method) -> Outcome {
    let mu = spec.star_product(method)?;
    let mut r = Report::new("star-product");
    let assoc = check_associativity(&mu, 2);
    r.verdict("associativity", assoc.passed, assoc.witness);
    let unit = check_unit(&mu, 2);
    r.verdict("unit", unit.passed, unit.witness);
    let pol = if method == Method::MoyalWeyl {
        ("wpsp", check_wpsp(&mu, 3))
    } else {
        ("psp", check_psp(&mu, 3))
    };
    r.verdict(pol.0, pol.1.passed, pol.1.witness);
    r.artifact(
        "table",
        serial::star_product_value(&mu),
        mu.table().to_literal(),
    );
    Ok((r, Some(serial::star_product_to_json(&mu))))
}

pub fn curvature(spec: &ChartSpec) -> Outcome {
    let rep = spec.curvature_report()?;
    let mut r = Report::new("curvature");
    r.verdict("wick_curvature_is_omega_t", rep.wick_is_omega, None);
    r.verdict("weyl_curvature_is_shifted", rep.weyl_is_shifted, None);
    r.verdict("trace_matches_transport", rep.trace_transport_agrees, None);
    form_artifact(&mut r, "omega_t", &rep.omega_t);
    form_artifact(&mut r, "trace", &rep.trace_form);
    form_artifact(&mut r, "omega_wick", &rep.omega_wick);
    form_artifact(&mut r, "omega_weyl", &rep.omega_weyl);
    Ok((r, None))
}

pub fn check(spec: &ChartSpec, source: &str, checks: &[Check], degree: u32) -> Outcome {
    let mu = load_product(spec, source)?;
    let mut r = Report::new("check");
    for c in checks {
        let out = c.run(&mu, degree);
        r.verdict(c.name(), out.passed, out.witness);
    }
    r.artifact(
        "basis",
        json!({"degree": degree}),
        format!("monomials of degree <= {}", degree),
    );
    Ok((r, None))
}

pub fn equiv(spec: &ChartSpec, left: &str, right: &str, identical_on_o: bool) -> Outcome {
    let a = load_product(spec, left)?;
    let b = load_product(spec, right)?;
    let mut r = Report::new("equiv");
    match equivalence_search(&a, &b, identical_on_o)? {
        Equivalence::Found(d) => {
            let regauged = apply_gauge(&d, &a)?;
            r.verdict("equivalent", true, None);
            r.verdict("regauge_matches", regauged.table() == b.table(), None);
            if identical_on_o {
                r.verdict("identical_on_o", d.identical_on_o(), None);
            }
            r.artifact("gauge", serial::diff_series_value(&d), d.to_literal());
            Ok((r, Some(serial::diff_series_to_json(&d))))
        }
        Equivalence::Obstruction { order, cocycle } => {
            r.verdict(
                "equivalent",
                false,
                Some(format!("t^{}: {}", order, cocycle.to_literal())),
            );
            r.artifact(
                "obstruction",
                json!({"order": order, "cocycle": serial::multi_diff_op_value(&cocycle)}),
                format!("t^{}: {}", order, cocycle.to_literal()),
            );
            Ok((r, None))
        }
    }
}

pub fn darboux(spec: &ChartSpec, source: &str) -> Outcome {
    let n = spec.n;
    let order = spec.order;
    // The characteristic form loses one order, so a method is built one higher.
    let from_method = Method::parse(source).is_some();
    let mu = if from_method {
        load_product(&spec.with_order(order + 1), source)?
    } else {
        load_product(spec, source)?
    };
    let mut r = Report::new("darboux");
    let psp = check_psp(&mu, 3);
    r.verdict("psp", psp.passed, psp.witness);
    if !psp.passed {
        return Ok((r, None));
    }
    let (omega, coords) = characteristic_form(&mu)?;
    let bracket = DeformedBracket::from_star_product(&mu)?;
    r.verdict("darboux_relations", check_darboux(&bracket, &coords), None);
    r.verdict("x_hat_in_o", coords.x_in_o(), None);
    let seed: Vec<TSeries> = (0..n)
        .map(|i| TSeries::from_poly(ChartPoly::x(n, i).pow(2), bracket.order()))
        .collect();
    let other = lift_darboux_seeded(&bracket, &seed)?;
    r.verdict(
        "independent_of_lift",
        check_darboux(&bracket, &other) && other.form() == omega,
        None,
    );
    if from_method {
        let want = spec.omega_t().with_order(omega.order());
        r.verdict(
            "recovers_chart_omega",
            omega == want,
            Some(format!("chart form {}", want.to_literal())),
        );
    }
    let (xj, xt) = series_list(&coords.x);
    let (yj, yt) = series_list(&coords.y);
    r.artifact("x_hat", xj, xt);
    r.artifact("y_hat", yj, yt);
    form_artifact(&mut r, "omega_t", &omega);
    Ok((r, Some(serial::form_to_json(&omega))))
}

pub fn trivialize(spec: &ChartSpec) -> Outcome {
    let omega_t = spec.omega_t();
    let a = trivialize_pair(&omega_t)?;
    let mut r = Report::new("trivialize");
    let std = BaseForm::standard_omega(spec.n, spec.order);
    r.verdict(
        "pullback_is_standard",
        a.pullback_form(&omega_t) == std,
        None,
    );
    r.verdict("preserves_o", a.preserves_o(), None);
    let text = a
        .to_literals()
        .iter()
        .enumerate()
        .map(|(j, s)| format!("{} -> {}", fedosov::algebra::poly::coord_name(spec.n, j), s))
        .collect::<Vec<_>>()
        .join("\n");
    r.artifact("automorphism", serial::automorphism_value(&a), text);
    Ok((r, Some(serial::automorphism_to_json(&a))))
}
