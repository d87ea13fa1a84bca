//! Randomized invariants across the stack. Random structures come from seeded
//! generators so every failure is reproducible from the reported seed.

mod common;

use common::*;
use fedosov::algebra::form::Wedge;
use fedosov::algebra::homotopy::poincare_homotopy;
use fedosov::algebra::poly::{monomials_up_to, Mono};
use fedosov::darboux::{
    characteristic_form, check_darboux, lift_darboux, trivialize_pair, DeformedBracket,
    FormalAutomorphism,
};
use fedosov::engine::{FedosovConnection, StarProduct};
use fedosov::fiber::{FiberElement, Ordering};
use fedosov::geometry::{ChristoffelData, LiftedConnection};
use fedosov::hochschild::{
    apply_gauge, solve_coboundary, CoboundaryConstraint, DiffSeries, MultiDiffOp,
};
use fedosov::serial;
use fedosov::{BaseForm, ChartPoly, Scalar, TSeries};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;
use std::sync::OnceLock;

fn rand_form(r: &mut StdRng, n: usize, order: usize, degree: u32, deg: u32) -> BaseForm {
    let mut out = BaseForm::zero(n, order);
    let wedges: Vec<Wedge> = (0..(1u32 << (2 * n)))
        .filter(|w| w.count_ones() == degree)
        .map(|w| w as Wedge)
        .collect();
    for _ in 0..3 {
        let w = wedges[r.gen_range(0..wedges.len())];
        out.add_term(w, &rand_series(r, n, order, deg, false));
    }
    out
}

fn rand_ternary(r: &mut StdRng, n: usize, max_order: u32, terms: usize) -> MultiDiffOp {
    let pool = monomials_up_to(2 * n, max_order);
    let mut out = MultiDiffOp::zero(n, 3);
    for _ in 0..terms {
        let idx: Vec<Mono> = (0..3)
            .map(|_| pool[r.gen_range(0..pool.len())].clone())
            .collect();
        out.add_term(idx, &rand_poly(r, n, 2, 2, false));
    }
    out
}

/// `1 + t^k c ∂_y^γ` with `c` a function of `x` and `|γ| >= 2`: identical on
/// `O` and `O`-linear, so it keeps a product strongly polarized.
fn rand_o_linear_gauge(r: &mut StdRng, n: usize, order: usize) -> DiffSeries {
    let ys: Vec<Mono> = monomials_up_to(2 * n, 3)
        .into_iter()
        .filter(|m| m[..n].iter().all(|&e| e == 0) && m.iter().sum::<u32>() >= 2)
        .collect();
    let mut d = DiffSeries::identity(n, order);
    for k in 1..=2 {
        let g = ys[r.gen_range(0..ys.len())].clone();
        let c = rand_poly(r, n, 2, 2, true);
        d = d.compose_after(&DiffSeries::one_plus(
            n,
            order,
            k,
            MultiDiffOp::term(n, vec![g], c),
        ));
    }
    d
}

fn poisson(f: &ChartPoly, g: &ChartPoly) -> ChartPoly {
    let n = f.n();
    let mut out = ChartPoly::zero(n);
    for i in 0..n {
        out.add_assign_ref(&f.partial(n + i).mul_ref(&g.partial(i)));
        out.sub_assign_ref(&f.partial(i).mul_ref(&g.partial(n + i)));
    }
    out
}

fn sample_fedosov() -> &'static FedosovConnection {
    static F: OnceLock<FedosovConnection> = OnceLock::new();
    F.get_or_init(|| FedosovConnection::build(&sample_connection(3)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_forms_have_primitives(seed in any::<u64>(), n in 1usize..=2, k in 0u32..=2) {
        let mut r = rng(seed);
        let a = rand_form(&mut r, n, 1, k, 4).d();
        prop_assume!(!a.is_zero());
        let h = poincare_homotopy(&a).unwrap();
        prop_assert_eq!(h.d(), a);
    }

    #[test]
    fn x_only_one_forms_have_x_only_primitives(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let f = rand_series(&mut r, n, 1, 4, true);
        let a = BaseForm::function(f).d();
        prop_assume!(!a.is_zero());
        let h = poincare_homotopy(&a).unwrap();
        prop_assert_eq!(h.d(), a);
        prop_assert!(h.coeff(0).depends_only_on_x());
    }

    #[test]
    fn inversion_is_involutive(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let order = 3;
        let c = ChartPoly::constant(n, rand_scalar(&mut r));
        let cs = vec![c, rand_poly(&mut r, n, 2, 3, false), rand_poly(&mut r, n, 2, 2, false), ChartPoly::zero(n)];
        let a = TSeries::from_coeffs(n, order, cs);
        let inv = a.invert().unwrap();
        prop_assert_eq!(a.mul(&inv), TSeries::one(n, order));
        prop_assert_eq!(inv.invert().unwrap(), a);
    }

    #[test]
    fn operations_are_deterministic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = rand_fiber(&mut r, 1, 3, 3, 4);
        let b = rand_fiber(&mut r, 1, 3, 3, 4);
        prop_assert_eq!(a.mul(&b).to_literal(), a.clone().mul(&b.clone()).to_literal());
        let f = rand_series(&mut r, 1, 3, 3, false);
        let g = rand_series(&mut r, 1, 3, 3, false);
        let mu = StarProduct::moyal_wick(1, 3);
        prop_assert_eq!(mu.eval(&f, &g).to_literal(), StarProduct::moyal_wick(1, 3).eval(&f, &g).to_literal());
    }

    #[test]
    fn fiber_product_is_associative(seed in any::<u64>(), n in 1usize..=2, weyl in any::<bool>()) {
        let mut r = rng(seed);
        let tag = if weyl { Ordering::Weyl } else { Ordering::Wick };
        let [a, b, c] = [0, 1, 2].map(|_| rand_fiber(&mut r, n, 3, 3, 3).retag(tag));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn p_elements_multiply_by_symbols(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = rand_fiber(&mut r, n, 3, 3, 5).filter(|k| k.fib[n..].iter().all(|&e| e == 0));
        let c = rand_fiber(&mut r, n, 3, 3, 5);
        prop_assert_eq!(a.mul(&c), symbol_product(&a, &c));
    }

    #[test]
    fn filtrations_are_respected(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = rand_fiber(&mut r, n, 3, 3, 5);
        let c = rand_fiber(&mut r, n, 3, 3, 5);
        let k = a.min_p_degree().unwrap_or(0);
        prop_assert!(a.mul(&c).in_fp(k));
        let di = a.delta_inverse();
        prop_assert!(di.in_fp(k));
        if let (Some(t1), Some(t0)) = (di.min_t_degree(), a.min_t_degree()) {
            prop_assert!(t1 > t0);
        }
    }

    #[test]
    fn delta_calculus(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = rand_fiber(&mut r, n, 3, 2, 5);
        prop_assert!(a.delta().delta().is_zero());
        prop_assert!(a.delta_star().delta_star().is_zero());
        let lap = a.delta().delta_star().add(&a.delta_star().delta());
        let graded = a.map_terms(|k, c| {
            let deg = (k.fiber_degree() + k.wedge.count_ones()) as i64;
            vec![(k.clone(), c.scale(&Scalar::from_int(deg)))]
        });
        prop_assert_eq!(lap, graded);
    }

    #[test]
    fn delta_cohomology_is_trivial(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = rand_fiber(&mut r, n, 3, 3, 5).delta();
        prop_assert!(a.terms().all(|(k, _)| k.wedge != 0));
        prop_assert_eq!(a.delta_inverse().delta(), a);
    }

    #[test]
    fn fedosov_sections_are_flat(seed in any::<u64>()) {
        let fed = sample_fedosov();
        let mut r = rng(seed);
        let f = TSeries::from_poly(rand_poly(&mut r, 1, 3, 3, false), 3);
        let e = fed.eta(&f).unwrap();
        // The top T-degree of a truncated section is not seen by δ.
        prop_assert!(fed.apply_d(&e).truncate_t(e.t_bound() - 1).is_zero());
        prop_assert_eq!(e.sigma(), f);
    }

    #[test]
    fn commutator_symbol_is_poisson(seed in any::<u64>()) {
        let fed = sample_fedosov();
        let mut r = rng(seed);
        let f = rand_poly(&mut r, 1, 3, 2, false);
        let g = rand_poly(&mut r, 1, 3, 2, false);
        let ef = fed.eta(&TSeries::from_poly(f.clone(), 3)).unwrap();
        let eg = fed.eta(&TSeries::from_poly(g.clone(), 3)).unwrap();
        let s = ef.bracket_over_t(&eg).sigma();
        prop_assert_eq!(s.coeff(0), &poisson(&f, &g));
    }

    #[test]
    fn moyal_wick_is_polarized(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let mu = StarProduct::moyal_wick(n, 3);
        let a = rand_poly(&mut r, n, 3, 3, true);
        let g = rand_poly(&mut r, n, 3, 3, false);
        prop_assert_eq!(mu.eval_poly(&a, &g), TSeries::from_poly(a.mul_ref(&g), 3));
    }

    #[test]
    fn hochschild_d_squares_to_zero(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        prop_assert!(rand_unary(&mut r, n, 0, 3, 3).hochschild_d().hochschild_d().is_zero());
        prop_assert!(rand_binary(&mut r, n, 2, 3).hochschild_d().hochschild_d().is_zero());
        prop_assert!(rand_ternary(&mut r, n, 2, 2).hochschild_d().hochschild_d().is_zero());
    }

    #[test]
    fn operator_identities_match_evaluation(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let nu = rand_binary(&mut r, n, 2, 3);
        let e = rand_unary(&mut r, n, 0, 2, 2);
        let e2 = rand_unary(&mut r, n, 0, 2, 2);
        let [f, g, h] = [0, 1, 2].map(|_| rand_poly(&mut r, n, 4, 2, false));
        let direct = &(&(&f.mul_ref(&nu.eval(&[g.clone(), h.clone()]))
            - &nu.eval(&[f.mul_ref(&g), h.clone()]))
            + &nu.eval(&[f.clone(), g.mul_ref(&h)]))
            - &nu.eval(&[f.clone(), g.clone()]).mul_ref(&h);
        prop_assert_eq!(nu.hochschild_d().eval(&[f.clone(), g.clone(), h.clone()]), direct);
        prop_assert_eq!(
            e.compose_after(&nu).eval(&[f.clone(), g.clone()]),
            e.eval(&[nu.eval(&[f.clone(), g.clone()])])
        );
        prop_assert_eq!(
            nu.compose_before(&[&e, &e2]).eval(&[f.clone(), g.clone()]),
            nu.eval(&[e.eval(&[f.clone()]), e2.eval(&[g.clone()])])
        );
        let half = Scalar::frac(1, 2);
        let alt = &nu.eval(&[f.clone(), g.clone()]) - &nu.eval(&[g.clone(), f.clone()]);
        prop_assert_eq!(nu.alternate().eval(&[f, g]), alt.scale(&half));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn polarized_cochains_are_repaired(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        // σ vanishes when its first argument is in O; e vanishes on O.
        let mut sigma = MultiDiffOp::zero(n, 2);
        for (idx, c) in rand_binary(&mut r, n, 2, 3).terms() {
            if idx[0][n..].iter().any(|&v| v > 0) {
                sigma.add_term(idx.clone(), c);
            }
        }
        let mut e = MultiDiffOp::zero(n, 1);
        for (idx, c) in rand_unary(&mut r, n, 2, 4, 3).terms() {
            if idx[0][n..].iter().any(|&v| v > 0) {
                e.add_term(idx.clone(), c);
            }
        }
        let nu = sigma.add(&e.hochschild_d());
        prop_assert!(nu.is_polarized());
        prop_assert!(nu.hochschild_d().is_strongly_polarized());
        let b = solve_coboundary(&nu, CoboundaryConstraint::MakeStronglyPolarized, true).unwrap();
        prop_assert!(nu.add(&b.hochschild_d()).is_strongly_polarized());
    }

    #[test]
    fn alternation_recovers_bivector(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let mut pi = MultiDiffOp::zero(n, 2);
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let c = rand_poly(&mut r, n, 2, 2, false);
                let (mut a, mut b) = (vec![0; 2 * n], vec![0; 2 * n]);
                a[i] = 1;
                b[j] = 1;
                pi.add_term(vec![a.clone(), b.clone()], &c);
                pi.add_term(vec![b, a], &-&c);
            }
        }
        let exact = rand_unary(&mut r, n, 1, 3, 3).hochschild_d();
        let nu = pi.add(&exact);
        prop_assert!(nu.hochschild_d().is_zero());
        prop_assert_eq!(nu.alternate(), pi.clone());
        let b = solve_coboundary(&nu, CoboundaryConstraint::KillCommutativePart, false).unwrap();
        prop_assert_eq!(nu.add(&b.hochschild_d()), pi);
    }

    #[test]
    fn o_linear_gauges_keep_the_characteristic_form(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let order = 3;
        let mu = StarProduct::moyal_wick(n, order);
        let d = rand_o_linear_gauge(&mut r, n, order);
        prop_assert!(d.identical_on_o());
        let gauged = apply_gauge(&d, &mu).unwrap();
        let (before, _) = characteristic_form(&mu).unwrap();
        let (after, coords) = characteristic_form(&gauged).unwrap();
        prop_assert_eq!(after, before);
        let b = DeformedBracket::from_star_product(&gauged).unwrap();
        prop_assert!(check_darboux(&b, &coords));
        prop_assert!(check_darboux(&b, &lift_darboux(&b).unwrap()));
    }

    #[test]
    fn trivialization_pulls_back_to_standard(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let order = 3;
        let mut lambda = BaseForm::zero(n, order);
        for i in 0..n {
            let g = rand_poly(&mut r, n, 3, 2, false);
            let g = TSeries::from_poly(g, order).shift_up(1);
            lambda.add_term(1 << i, &g);
        }
        let omega_t = BaseForm::standard_omega(n, order).add(&lambda.d());
        let a = trivialize_pair(&omega_t).unwrap();
        prop_assert_eq!(a.pullback_form(&omega_t), BaseForm::standard_omega(n, order));
        prop_assert!(a.preserves_o());
    }

    #[test]
    fn x_functions_commute(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let a = rand_poly(&mut r, n, 4, 3, true);
        let b = rand_poly(&mut r, n, 4, 3, true);
        prop_assert!(poisson(&a, &b).is_zero());
        let std = DeformedBracket::standard(n, 1);
        prop_assert!(std.eval(&TSeries::from_poly(a, 1), &TSeries::from_poly(b, 1)).is_zero());
        let g = rand_poly(&mut r, n, 4, 3, false);
        let commutes = (0..n).all(|i| poisson(&g, &ChartPoly::x(n, i)).is_zero());
        prop_assert_eq!(commutes, g.depends_only_on_x());
    }

    #[test]
    fn pullback_respects_composition(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let order = 3;
        let mut autos = Vec::new();
        for _ in 0..2 {
            let subs = (0..2 * n)
                .map(|j| {
                    let z = TSeries::from_poly(ChartPoly::var(n, j), order);
                    z.add(&TSeries::from_poly(rand_poly(&mut r, n, 2, 2, false), order).shift_up(1))
                })
                .collect();
            autos.push(FormalAutomorphism::new(subs).unwrap());
        }
        let f = rand_series(&mut r, n, order, 3, false);
        let (a, b) = (&autos[0], &autos[1]);
        prop_assert_eq!(a.compose(b).pullback(&f), b.pullback(&a.pullback(&f)));
        prop_assert_eq!(a.inverse().pullback(&a.pullback(&f)), f);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let order = 2;
        let mu = apply_gauge(&rand_o_linear_gauge(&mut r, n, order), &StarProduct::moyal_wick(n, order)).unwrap();
        let text = serial::star_product_to_json(&mu);
        let back = serial::star_product_from_json(&text).unwrap();
        prop_assert_eq!(back.table(), mu.table());
        prop_assert_eq!(serial::star_product_to_json(&back), text);

        let k = r.gen_range(0..=2);
        let a = rand_form(&mut r, n, order, k, 3);
        let text = serial::form_to_json(&a);
        prop_assert_eq!(serial::form_to_json(&serial::form_from_json(&text).unwrap()), text);

        let subs = (0..2 * n)
            .map(|j| {
                let z = TSeries::from_poly(ChartPoly::var(n, j), order);
                z.add(&TSeries::from_poly(rand_poly(&mut r, n, 2, 2, false), order).shift_up(1))
            })
            .collect();
        let phi = FormalAutomorphism::new(subs).unwrap();
        let text = serial::automorphism_to_json(&phi);
        prop_assert_eq!(serial::automorphism_to_json(&serial::automorphism_from_json(&text).unwrap()), text);
    }
}

#[test]
fn y_monomials_do_not_commute_with_x() {
    for n in [1, 2] {
        let mut images = std::collections::BTreeSet::new();
        for m in monomials_up_to(2 * n, 4) {
            if m[n..].iter().all(|&e| e == 0) {
                continue;
            }
            let g = ChartPoly::monomial(n, m.clone(), Scalar::one());
            let img: Vec<String> = (0..n)
                .map(|i| poisson(&g, &ChartPoly::x(n, i)).to_literal())
                .collect();
            assert!(
                img.iter().any(|s| s != "0"),
                "{:?} commutes with every x",
                m
            );
            assert!(images.insert(img), "two monomials share an image");
        }
    }
}

#[test]
fn curvature_satisfies_bianchi_identities() {
    let gamma = sample_connection(3);
    let conn = LiftedConnection::checked(&gamma).unwrap();
    for tag in [Ordering::Wick, Ordering::Weyl] {
        let r = conn.curvature_element(tag);
        for j in 0..2 {
            let g = FiberElement::generator(1, 3, tag, j);
            assert_eq!(conn.apply(&conn.apply(&g)), r.bracket_over_t(&g));
        }
        assert!(conn.apply(&r).is_zero());
    }
    assert!(conn.curvature_element(Ordering::Wick).delta().is_zero());
}

#[test]
fn trace_changes_by_exact_p_perp_form() {
    let order = 3;
    let other = ChristoffelData::from_lowered(
        1,
        order,
        &[
            (0, 0, 0, series("x^2 + y", 1, order)),
            (0, 0, 1, series("x*y", 1, order)),
        ],
    );
    let base = sample_connection(order);
    for g in [&base, &other] {
        let tr = g.trace_form();
        assert!(tr.d().is_zero());
    }
    let diff = other.trace_form().sub(&base.trace_form());
    assert!(!diff.is_zero());
    let lambda = fedosov::darboux::p_perp_potential(&diff).unwrap();
    assert!(lambda.in_p_perp());
    assert_eq!(lambda.d(), diff);
}
