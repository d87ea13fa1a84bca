//! Seeded generators and sample data shared by the integration targets.
#![allow(dead_code)]

use fedosov::algebra::form::{wedge_sign, Wedge};
use fedosov::algebra::literal::parse_series;
use fedosov::algebra::poly::{monomials_up_to, Mono};
use fedosov::fiber::{FKey, FiberElement, Ordering};
use fedosov::geometry::ChristoffelData;
use fedosov::hochschild::MultiDiffOp;
use fedosov::{ChartPoly, Scalar, TSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn series(lit: &str, n: usize, order: usize) -> TSeries {
    parse_series(lit, n, order).unwrap()
}

pub fn rand_scalar(r: &mut StdRng) -> Scalar {
    let p = r.gen_range(-4..=4);
    let q = r.gen_range(1..=3);
    Scalar::frac(if p == 0 { 1 } else { p }, q)
}

/// A random polynomial with up to `terms` monomials of degree `<= deg`.
pub fn rand_poly(r: &mut StdRng, n: usize, deg: u32, terms: usize, x_only: bool) -> ChartPoly {
    let pool: Vec<Mono> = monomials_up_to(2 * n, deg)
        .into_iter()
        .filter(|m| !x_only || m[n..].iter().all(|&e| e == 0))
        .collect();
    let mut p = ChartPoly::zero(n);
    for _ in 0..terms {
        let m = pool[r.gen_range(0..pool.len())].clone();
        p.add_term(m, &rand_scalar(r));
    }
    p
}

pub fn rand_series(r: &mut StdRng, n: usize, order: usize, deg: u32, x_only: bool) -> TSeries {
    let cs = (0..=order)
        .map(|k| {
            if k <= 1 {
                rand_poly(r, n, deg, 3, x_only)
            } else {
                ChartPoly::zero(n)
            }
        })
        .collect();
    TSeries::from_coeffs(n, order, cs)
}

/// A random Wick element with fiber degree `<= fib_deg`, `t`-power `<= 1`
/// and arbitrary wedge part.
pub fn rand_fiber(
    r: &mut StdRng,
    n: usize,
    order: usize,
    fib_deg: u32,
    terms: usize,
) -> FiberElement {
    let mut out = FiberElement::zero(n, order, Ordering::Wick);
    let fibs = monomials_up_to(2 * n, fib_deg);
    for _ in 0..terms {
        let key = FKey {
            fib: fibs[r.gen_range(0..fibs.len())].clone(),
            wedge: r.gen_range(0..(1u32 << (2 * n))),
            tp: r.gen_range(0..=1),
        };
        out.add_term(key, &rand_poly(r, n, 2, 2, false));
    }
    out
}

/// The symbol-level (supercommutative) product of two Wick elements.
pub fn symbol_product(a: &FiberElement, b: &FiberElement) -> FiberElement {
    let mut out = FiberElement::zero(a.n(), a.order(), a.tag());
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            let s = match wedge_sign(ka.wedge, kb.wedge) {
                Some(s) => s,
                None => continue,
            };
            let key = FKey {
                fib: ka.fib.iter().zip(&kb.fib).map(|(u, v)| u + v).collect(),
                wedge: (ka.wedge | kb.wedge) as Wedge,
                tp: ka.tp + kb.tp,
            };
            out.add_term(key, &ca.mul_ref(cb).scale(&Scalar::from_int(s)));
        }
    }
    out
}

/// A torsion-free, symplectic, `P`-preserving connection on the `n = 1`
/// chart with nonzero trace of its curvature on `P`.
pub fn sample_connection(order: usize) -> ChristoffelData {
    ChristoffelData::from_lowered(
        1,
        order,
        &[
            (0, 0, 0, series("y", 1, order)),
            (0, 0, 1, series("y", 1, order)),
        ],
    )
}

/// A random unary operator `Σ c ∂^γ` with `|γ| >= min_order`.
pub fn rand_unary(
    r: &mut StdRng,
    n: usize,
    min_order: u32,
    max_order: u32,
    terms: usize,
) -> MultiDiffOp {
    let pool: Vec<Mono> = monomials_up_to(2 * n, max_order)
        .into_iter()
        .filter(|m| m.iter().sum::<u32>() >= min_order)
        .collect();
    let mut out = MultiDiffOp::zero(n, 1);
    for _ in 0..terms {
        let g = pool[r.gen_range(0..pool.len())].clone();
        out.add_term(vec![g], &rand_poly(r, n, 2, 2, false));
    }
    out
}

/// A random 2-cochain with derivative orders `<= max_order` in each slot.
pub fn rand_binary(r: &mut StdRng, n: usize, max_order: u32, terms: usize) -> MultiDiffOp {
    let pool = monomials_up_to(2 * n, max_order);
    let mut out = MultiDiffOp::zero(n, 2);
    for _ in 0..terms {
        let a = pool[r.gen_range(0..pool.len())].clone();
        let b = pool[r.gen_range(0..pool.len())].clone();
        out.add_term(vec![a, b], &rand_poly(r, n, 2, 2, false));
    }
    out
}
