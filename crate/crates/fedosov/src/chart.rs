//! Chart data: a deformed polarized form `ω_t = d Σ (y_i + t g_i) dx_i`
//! together with connection symbols given in normalized coordinates.
//!
//! The substitution `Φ(x, y) = (x, y + t g)` satisfies `Φ^* ω_0 = ω_t` and
//! fixes every `x_i`, so products, curvatures and connections built for the
//! standard form move to `ω_t` by pulling back along `Φ`.

use crate::algebra::form::BaseForm;
use crate::algebra::poly::{monomials_up_to, ChartPoly};
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::darboux::FormalAutomorphism;
use crate::engine::{reconstruct_table, FedosovConnection, StarProduct};
use crate::error::EngineError;
use crate::geometry::ChristoffelData;
use std::collections::BTreeMap;

/// Which star-product to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Fedosov,
    MoyalWeyl,
    MoyalWick,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fedosov => "fedosov",
            Method::MoyalWeyl => "moyal_weyl",
            Method::MoyalWick => "moyal_wick",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "fedosov" => Some(Method::Fedosov),
            "moyal_weyl" => Some(Method::MoyalWeyl),
            "moyal_wick" => Some(Method::MoyalWick),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartSpec {
    pub n: usize,
    pub order: usize,
    /// `g_1..g_n`.
    pub potential: Vec<TSeries>,
    /// Symbols in the normalized coordinates `Φ(x, y)`.
    pub christoffel: ChristoffelData,
    pub bindings: BTreeMap<String, TSeries>,
}

/// Verdicts and forms for the curvature identity on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureReport {
    pub omega_t: BaseForm,
    pub trace_form: BaseForm,
    pub omega_wick: BaseForm,
    pub omega_weyl: BaseForm,
    /// `Ω_wick = ω_t`.
    pub wick_is_omega: bool,
    /// `Ω_weyl = ω_t + (t/2) tr(∇²|P)`.
    pub weyl_is_shifted: bool,
    /// The trace pulled back from normalized coordinates equals the trace of
    /// the transported connection.
    pub trace_transport_agrees: bool,
}

impl CurvatureReport {
    pub fn all_passed(&self) -> bool {
        self.wick_is_omega && self.weyl_is_shifted && self.trace_transport_agrees
    }
}

impl ChartSpec {
    /// The standard chart with the flat connection.
    pub fn standard(n: usize, order: usize) -> Self {
        ChartSpec {
            n,
            order,
            potential: vec![TSeries::zero(n, order); n],
            christoffel: ChristoffelData::flat(n, order),
            bindings: BTreeMap::new(),
        }
    }

    pub fn is_deformed(&self) -> bool {
        self.potential.iter().any(|g| !g.is_zero())
    }

    /// The same chart at another truncation order.
    pub fn with_order(&self, order: usize) -> ChartSpec {
        ChartSpec {
            n: self.n,
            order,
            potential: self.potential.iter().map(|g| g.with_order(order)).collect(),
            christoffel: self.christoffel.with_order(order),
            bindings: self
                .bindings
                .iter()
                .map(|(k, v)| (k.clone(), v.with_order(order)))
                .collect(),
        }
    }

    /// `λ_t = Σ (y_i + t g_i) dx_i`.
    pub fn lambda(&self) -> BaseForm {
        let mut out = BaseForm::zero(self.n, self.order);
        for i in 0..self.n {
            let y = TSeries::from_poly(ChartPoly::y(self.n, i), self.order);
            out.add_term(1 << i, &y.add(&self.potential[i].shift_up(1)));
        }
        out
    }

    pub fn omega_t(&self) -> BaseForm {
        self.lambda().d()
    }

    /// `Φ(x, y) = (x, y + t g)`.
    pub fn normalizing_map(&self) -> FormalAutomorphism {
        let n = self.n;
        let subs = (0..2 * n)
            .map(|j| {
                let z = TSeries::from_poly(ChartPoly::var(n, j), self.order);
                if j < n {
                    z
                } else {
                    z.add(&self.potential[j - n].shift_up(1))
                }
            })
            .collect();
        FormalAutomorphism::new(subs).expect("identity at order 0")
    }

    /// The connection in the original coordinates.
    pub fn christoffel_original(&self) -> ChristoffelData {
        self.christoffel
            .transport(self.normalizing_map().substitution())
    }

    pub fn fedosov(&self) -> Result<FedosovConnection, EngineError> {
        FedosovConnection::build(&self.christoffel)
    }

    /// The star-product for `ω_t` and `O` = functions of `x`.
    pub fn star_product(&self, method: Method) -> Result<StarProduct, EngineError> {
        let base = match method {
            Method::Fedosov => self.fedosov()?.extract_star_product(self.order as u32)?,
            Method::MoyalWeyl => StarProduct::moyal_weyl(self.n, self.order),
            Method::MoyalWick => StarProduct::moyal_wick(self.n, self.order),
        };
        if !self.is_deformed() {
            return Ok(base);
        }
        Ok(transport_product(&base, &self.normalizing_map())?.with_method(method.name()))
    }

    pub fn curvature_report(&self) -> Result<CurvatureReport, EngineError> {
        let phi = self.normalizing_map();
        let f = self.fedosov()?;
        let (wick, weyl) = f.curvatures()?;
        let trace_norm = self.christoffel.trace_form();
        let omega_t = self.omega_t();
        let trace_form = phi.pullback_form(&trace_norm);
        let omega_wick = phi.pullback_form(&wick);
        let omega_weyl = phi.pullback_form(&weyl);
        let shifted = omega_t.add(&trace_form.shift_up(1).scale(&Scalar::frac(1, 2)));
        Ok(CurvatureReport {
            wick_is_omega: omega_wick == omega_t,
            weyl_is_shifted: omega_weyl == shifted,
            trace_transport_agrees: self.christoffel_original().trace_form() == trace_form,
            omega_t,
            trace_form,
            omega_wick,
            omega_weyl,
        })
    }
}

/// The product `(f, g) ↦ Φ^*(μ((Φ⁻¹)^* f, (Φ⁻¹)^* g))`, i.e. `μ` moved from
/// the coordinates `Φ(z)` to `z`.
pub fn transport_product(
    mu: &StarProduct,
    phi: &FormalAutomorphism,
) -> Result<StarProduct, EngineError> {
    let n = mu.n();
    let order = mu.order();
    let inv = phi.inverse_substitution();
    let moved: Vec<TSeries> = monomials_up_to(2 * n, order as u32)
        .into_iter()
        .map(|m| TSeries::from_poly(ChartPoly::monomial(n, m, Scalar::one()), order).compose(inv))
        .collect();
    let table = reconstruct_table(n, order, order as u32, |i, j| {
        Ok(phi.pullback(&mu.eval(&moved[i], &moved[j])))
    })?;
    Ok(StarProduct::from_table(table, mu.method().to_string()))
}
