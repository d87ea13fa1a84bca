//! Exact checks of product tables on monomial bases, each reporting the
//! first counterexample it meets.
//!
//! Bases: associativity runs over all monomial triples of degree `<= d`;
//! the polarization checks pair every monomial in `x` of degree `<= d` with
//! every monomial of degree `<= d`; the unit check uses all monomials of
//! degree `<= d`; Jacobi uses the order-`t` bracket on degree `<= 2`.

use crate::algebra::poly::{monomials_up_to, ChartPoly, Mono};
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::darboux::DeformedBracket;
use crate::engine::StarProduct;
use crate::geometry::CheckOutcome;
use std::collections::HashMap;

/// The checks selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Assoc,
    Psp,
    Wpsp,
    Unit,
    BracketJacobi,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Assoc,
        Check::Psp,
        Check::Wpsp,
        Check::Unit,
        Check::BracketJacobi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Assoc => "assoc",
            Check::Psp => "psp",
            Check::Wpsp => "wpsp",
            Check::Unit => "unit",
            Check::BracketJacobi => "bracket_jacobi",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn run(&self, mu: &StarProduct, degree: u32) -> CheckOutcome {
        match self {
            Check::Assoc => check_associativity(mu, degree),
            Check::Psp => check_psp(mu, degree),
            Check::Wpsp => check_wpsp(mu, degree),
            Check::Unit => check_unit(mu, degree),
            Check::BracketJacobi => check_bracket_jacobi(mu),
        }
    }
}

fn mono_poly(n: usize, m: &Mono) -> ChartPoly {
    ChartPoly::monomial(n, m.clone(), Scalar::one())
}

fn x_monomials(n: usize, d: u32) -> Vec<Mono> {
    monomials_up_to(2 * n, d)
        .into_iter()
        .filter(|m| m[n..].iter().all(|&e| e == 0))
        .collect()
}

/// Memoized `μ(m, m')` on monomials, extended bilinearly.
struct ProductCache<'a> {
    mu: &'a StarProduct,
    cache: HashMap<(Mono, Mono), TSeries>,
}

impl<'a> ProductCache<'a> {
    fn new(mu: &'a StarProduct) -> Self {
        ProductCache {
            mu,
            cache: HashMap::new(),
        }
    }

    fn mono(&mut self, a: &Mono, b: &Mono) -> TSeries {
        let mu = self.mu;
        let n = mu.n();
        self.cache
            .entry((a.clone(), b.clone()))
            .or_insert_with(|| mu.eval_poly(&mono_poly(n, a), &mono_poly(n, b)))
            .clone()
    }

    fn series(&mut self, f: &TSeries, g: &TSeries) -> TSeries {
        let mu = self.mu;
        let mut out = TSeries::zero(mu.n(), mu.order());
        for (i, fi) in f.coeffs().iter().enumerate() {
            for (j, gj) in g.coeffs().iter().enumerate() {
                if i + j > mu.order() {
                    continue;
                }
                for (ma, ca) in fi.terms() {
                    for (mb, cb) in gj.terms() {
                        let c = ca.clone() * cb.clone();
                        let v = self.mono(ma, mb).shift_up(i + j).scale(&c);
                        out.add_assign_ref(&v);
                    }
                }
            }
        }
        out
    }
}

/// `μ(μ(f,g),h) = μ(f,μ(g,h))` on monomial triples of degree `<= d`.
pub fn check_associativity(mu: &StarProduct, d: u32) -> CheckOutcome {
    let n = mu.n();
    let o = mu.order();
    let basis: Vec<TSeries> = monomials_up_to(2 * n, d)
        .iter()
        .map(|m| TSeries::from_poly(mono_poly(n, m), o))
        .collect();
    let mut pc = ProductCache::new(mu);
    let pairs: Vec<Vec<TSeries>> = basis
        .iter()
        .map(|f| basis.iter().map(|g| pc.series(f, g)).collect())
        .collect();
    for (i, f) in basis.iter().enumerate() {
        for (j, g) in basis.iter().enumerate() {
            for (k, h) in basis.iter().enumerate() {
                let left = pc.series(&pairs[i][j], h);
                let right = pc.series(f, &pairs[j][k]);
                let diff = left.sub(&right);
                if let Some(v) = diff.valuation() {
                    return CheckOutcome::fail(format!(
                        "t^{}: ({}, {}, {}) has residual {}",
                        v,
                        f.to_literal(),
                        g.to_literal(),
                        h.to_literal(),
                        diff.to_literal()
                    ));
                }
            }
        }
    }
    CheckOutcome::pass()
}

fn check_pairs(mu: &StarProduct, left: &[Mono], right: &[Mono]) -> CheckOutcome {
    let n = mu.n();
    let o = mu.order();
    for a in left {
        for g in right {
            let (pa, pg) = (mono_poly(n, a), mono_poly(n, g));
            let got = mu.eval_poly(&pa, &pg);
            let want = TSeries::from_poly(pa.mul_ref(&pg), o);
            if got != want {
                return CheckOutcome::fail(format!(
                    "a = {}, g = {}: product {} differs from {}",
                    pa.to_literal(),
                    pg.to_literal(),
                    got.to_literal(),
                    want.to_literal()
                ));
            }
        }
    }
    CheckOutcome::pass()
}

/// `μ(a, g) = ag` for `a` in `x` only.
pub fn check_psp(mu: &StarProduct, d: u32) -> CheckOutcome {
    let n = mu.n();
    check_pairs(mu, &x_monomials(n, d), &monomials_up_to(2 * n, d))
}

/// `μ(a, b) = ab` for `a, b` in `x` only.
pub fn check_wpsp(mu: &StarProduct, d: u32) -> CheckOutcome {
    let xs = x_monomials(mu.n(), d);
    check_pairs(mu, &xs, &xs)
}

/// `μ(1, f) = μ(f, 1) = f`.
pub fn check_unit(mu: &StarProduct, d: u32) -> CheckOutcome {
    let n = mu.n();
    let one = vec![vec![0; 2 * n]];
    let all = monomials_up_to(2 * n, d);
    let left = check_pairs(mu, &one, &all);
    if !left.passed {
        return left;
    }
    check_pairs(mu, &all, &one)
}

/// The order-`t` commutator is a formal Poisson bracket extending the
/// standard one.
pub fn check_bracket_jacobi(mu: &StarProduct) -> CheckOutcome {
    if mu.order() == 0 {
        return CheckOutcome::pass();
    }
    match DeformedBracket::from_star_product(mu).and_then(|b| b.validate()) {
        Ok(()) => CheckOutcome::pass(),
        Err(e) => CheckOutcome::fail(e.to_string()),
    }
}
