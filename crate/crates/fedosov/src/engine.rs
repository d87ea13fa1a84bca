//! The Fedosov iteration: the flat connection `D = ∇ + δ + (1/t) ad r`, its
//! curvatures, the quantization map `η`, and star-product tables.

use crate::algebra::form::BaseForm;
use crate::algebra::poly::{monomials_up_to, ChartPoly, Mono};
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::error::EngineError;
use crate::fiber::{FiberElement, Ordering};
use crate::geometry::{ChristoffelData, LiftedConnection};
use crate::hochschild::{DiffSeries, MultiDiffOp};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// An order-by-order table `μ_0 + t μ_1 + …` of bidifferential operators.
/// The polarized subalgebra is always `O` = functions of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarProduct {
    table: DiffSeries,
    method: String,
}

impl StarProduct {
    pub fn from_table(table: DiffSeries, method: impl Into<String>) -> Self {
        assert_eq!(table.arity(), 2, "star-product tables are bidifferential");
        StarProduct {
            table,
            method: method.into(),
        }
    }

    /// Pointwise multiplication.
    pub fn commutative(n: usize, order: usize) -> Self {
        let mut table = DiffSeries::zero(n, order, 2);
        *table.part_mut(0) = MultiDiffOp::product(n);
        StarProduct::from_table(table, "commutative")
    }

    /// `μ_k = Σ_{|γ|=k} (1/γ!) ∂_y^γ ⊗ ∂_x^γ`.
    pub fn moyal_wick(n: usize, order: usize) -> Self {
        let mut table = DiffSeries::zero(n, order, 2);
        for g in monomials_up_to(n, order as u32) {
            let k: u32 = g.iter().sum();
            let mut c = Scalar::one();
            let mut left = vec![0; 2 * n];
            let mut right = vec![0; 2 * n];
            for i in 0..n {
                c = &c * &Scalar::inv_factorial(g[i]);
                left[n + i] = g[i];
                right[i] = g[i];
            }
            table
                .part_mut(k as usize)
                .add_term(vec![left, right], &ChartPoly::constant(n, c));
        }
        StarProduct::from_table(table, "moyal_wick")
    }

    /// `exp((t/2) Σ_i (∂_{y_i} ⊗ ∂_{x_i} − ∂_{x_i} ⊗ ∂_{y_i}))`.
    pub fn moyal_weyl(n: usize, order: usize) -> Self {
        let mut table = DiffSeries::zero(n, order, 2);
        for m in monomials_up_to(2 * n, order as u32) {
            // m = (γ, ε): γ pairs ∂_y ⊗ ∂_x, ε pairs ∂_x ⊗ ∂_y
            let k: u32 = m.iter().sum();
            let (g, e) = m.split_at(n);
            let mut c = Scalar::frac(1, 1i64 << k);
            if e.iter().sum::<u32>() % 2 == 1 {
                c = -c;
            }
            let mut left = vec![0; 2 * n];
            let mut right = vec![0; 2 * n];
            for i in 0..n {
                c = &(&c * &Scalar::inv_factorial(g[i])) * &Scalar::inv_factorial(e[i]);
                left[n + i] = g[i];
                left[i] = e[i];
                right[i] = g[i];
                right[n + i] = e[i];
            }
            table
                .part_mut(k as usize)
                .add_term(vec![left, right], &ChartPoly::constant(n, c));
        }
        StarProduct::from_table(table, "moyal_weyl")
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn table(&self) -> &DiffSeries {
        &self.table
    }

    pub fn part(&self, k: usize) -> &MultiDiffOp {
        self.table.part(k)
    }

    pub fn with_method(mut self, method: impl Into<String>) -> Self {
        self.method = method.into();
        self
    }

    /// `f ∗ g` mod `t^{N+1}`.
    pub fn eval(&self, f: &TSeries, g: &TSeries) -> TSeries {
        self.table.eval(&[f.clone(), g.clone()])
    }

    /// `f ∗ g` for polynomials independent of `t`.
    pub fn eval_poly(&self, f: &ChartPoly, g: &ChartPoly) -> TSeries {
        let o = self.order();
        self.eval(
            &TSeries::from_poly(f.clone(), o),
            &TSeries::from_poly(g.clone(), o),
        )
    }

    /// `(1/t)(f ∗ g − g ∗ f)`, exact mod `t^N`.
    pub fn bracket(&self, f: &TSeries, g: &TSeries) -> TSeries {
        let d = self.eval(f, g).sub(&self.eval(g, f)).shift_down(1);
        d.with_order(self.order().saturating_sub(1))
    }

    /// The same product at a lower truncation order.
    pub fn truncated(&self, order: usize) -> StarProduct {
        assert!(order <= self.order(), "cannot raise the truncation order");
        StarProduct::from_table(self.table.with_order(order), self.method.clone())
    }
}

/// `σ(a∘b)` in the Wick tag: `Σ_β t^{|β|} β! a_{(0,β)} b_{(β,0)}`.
pub fn sigma_product(a: &FiberElement, b: &FiberElement) -> TSeries {
    assert_eq!(a.tag(), Ordering::Wick, "Wick symbols expected");
    assert_eq!(b.tag(), Ordering::Wick, "Wick symbols expected");
    let n = a.n();
    let order = a.order();
    let mut out = TSeries::zero(n, order);
    let mut index: HashMap<(Vec<u32>, u32), &ChartPoly> = HashMap::new();
    for (k, c) in b.terms() {
        if k.wedge == 0 && k.fib[n..].iter().all(|&v| v == 0) {
            index.insert((k.fib[..n].to_vec(), k.tp), c);
        }
    }
    for (ka, ca) in a.terms() {
        if ka.wedge != 0 || ka.fib[..n].iter().any(|&v| v != 0) {
            continue;
        }
        let beta = &ka.fib[n..];
        let deg: u32 = beta.iter().sum();
        let mut fact: i64 = 1;
        for &b in beta {
            fact *= (1..=b as i64).product::<i64>();
        }
        for tb in 0..=order as u32 {
            let tp = ka.tp + tb + deg;
            if tp as usize > order {
                break;
            }
            if let Some(cb) = index.get(&(beta.to_vec(), tb)) {
                let v = ca.mul_ref(cb).scale(&Scalar::from_int(fact));
                out.coeff_mut(tp as usize).add_assign_ref(&v);
            }
        }
    }
    out
}

/// Postcondition checks of a built connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FedosovReport {
    /// `F^T(r) >= 3`.
    pub r_filtration_t: bool,
    /// `F^P(r) >= 1`.
    pub r_filtration_p: bool,
    /// `D² = 0` on every fiber generator.
    pub flat: bool,
    /// `Ω_wick = ω`.
    pub wick_curvature_is_omega: bool,
}

impl FedosovReport {
    pub fn all_passed(&self) -> bool {
        self.r_filtration_t && self.r_filtration_p && self.flat && self.wick_curvature_is_omega
    }
}

/// `D = ∇ + δ + (1/t) ad r` built from a validated connection.
#[derive(Debug)]
pub struct FedosovConnection {
    conn: LiftedConnection,
    r: FiberElement,
    order: usize,
    eta_cache: Mutex<HashMap<TSeries, FiberElement>>,
}

impl Clone for FedosovConnection {
    fn clone(&self) -> Self {
        FedosovConnection {
            conn: self.conn.clone(),
            r: self.r.clone(),
            order: self.order,
            eta_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl FedosovConnection {
    /// Solves `r = −δ⁻¹(R + ∇r + (1/t) r²)` by iteration; each pass fixes at
    /// least one more `T`-degree, so the loop stops after at most `2N + 2`
    /// passes.
    pub fn build(gamma: &ChristoffelData) -> Result<Self, EngineError> {
        let conn = LiftedConnection::checked(gamma)?;
        let order = gamma.order();
        let r3 = conn.curvature_element(Ordering::Wick).delta_inverse().neg();
        let half = Scalar::frac(1, 2);
        let mut r = r3.clone();
        let cap = 2 * order + 4;
        for _ in 0..cap {
            let inner = conn.apply(&r).add(&r.bracket_over_t(&r).scale(&half));
            let next = r3.sub(&inner.delta_inverse());
            if next == r {
                return Ok(FedosovConnection::from_parts(conn, r));
            }
            r = next;
        }
        Err(EngineError::NonConvergence(format!(
            "r did not stabilize after {} passes",
            cap
        )))
    }

    pub fn from_parts(conn: LiftedConnection, r: FiberElement) -> Self {
        let order = r.order();
        FedosovConnection {
            conn,
            r,
            order,
            eta_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn r(&self) -> &FiberElement {
        &self.r
    }

    pub fn connection(&self) -> &LiftedConnection {
        &self.conn
    }

    pub fn christoffel(&self) -> &ChristoffelData {
        self.conn.christoffel()
    }

    /// `Da = ∇a + δa + (1/t)[r, a]`.
    pub fn apply_d(&self, a: &FiberElement) -> FiberElement {
        self.conn
            .apply(a)
            .add(&a.delta())
            .add(&self.r.bracket_over_t(a))
    }

    /// The connection form `Γ̂ + δ̃ + r` in the Wick tag.
    pub fn connection_form(&self) -> FiberElement {
        let n = self.n();
        self.conn
            .gamma_hat(Ordering::Wick)
            .add(&FiberElement::delta_tilde(n, self.order, Ordering::Wick))
            .add(&self.r)
    }

    /// `ω + δr + R + ∇r + (1/t) r²`, exact up to `T`-degree `2N + 1`.
    pub fn wick_curvature_element(&self) -> FiberElement {
        let n = self.n();
        let omega =
            FiberElement::from_form(&BaseForm::standard_omega(n, self.order), Ordering::Wick);
        omega
            .add(&self.r.delta())
            .add(&self.conn.curvature_element(Ordering::Wick))
            .add(&self.conn.apply(&self.r))
            .add(&self.r.bracket_over_t(&self.r).scale(&Scalar::frac(1, 2)))
            .truncate_t(2 * self.order as u32 + 1)
    }

    /// `R^F + ∇γ + (1/t)γ²` with `γ = δ̃ + r` in the Weyl tag, exact up to
    /// `T`-degree `2N + 1`.
    pub fn weyl_curvature_element(&self) -> FiberElement {
        let n = self.n();
        let gamma = FiberElement::delta_tilde(n, self.order, Ordering::Weyl)
            .add(&self.r.reorder(Ordering::Weyl));
        self.conn
            .curvature_element(Ordering::Weyl)
            .add(&self.conn.apply(&gamma))
            .add(&gamma.bracket_over_t(&gamma).scale(&Scalar::frac(1, 2)))
            .truncate_t(2 * self.order as u32 + 1)
    }

    /// `(Ω_wick, Ω_weyl)` as scalar 2-forms.
    pub fn curvatures(&self) -> Result<(BaseForm, BaseForm), EngineError> {
        let wick = self.wick_curvature_element();
        let weyl = self.weyl_curvature_element();
        if !wick.is_central() || !weyl.is_central() {
            return Err(EngineError::Precondition(
                "curvature has fiber-dependent terms".into(),
            ));
        }
        Ok((wick.central_form(), weyl.central_form()))
    }

    pub fn verify(&self) -> FedosovReport {
        let n = self.n();
        let bound = 2 * self.order as u32;
        let flat = (0..2 * n).all(|j| {
            let g = FiberElement::generator(n, self.order, Ordering::Wick, j);
            self.apply_d(&self.apply_d(&g)).truncate_t(bound).is_zero()
        });
        let omega =
            FiberElement::from_form(&BaseForm::standard_omega(n, self.order), Ordering::Wick);
        FedosovReport {
            r_filtration_t: self.r.in_ft(3),
            r_filtration_p: self.r.in_fp(1),
            flat,
            wick_curvature_is_omega: self.wick_curvature_element() == omega,
        }
    }

    /// The flat section with symbol `f`: `a = f − δ⁻¹(∇a + (1/t)[r, a])`.
    pub fn eta(&self, f: &TSeries) -> Result<FiberElement, EngineError> {
        if let Some(v) = self.eta_cache.lock().expect("cache poisoned").get(f) {
            return Ok(v.clone());
        }
        let f = f.with_order(self.order);
        let a0 = FiberElement::scalar(&f, Ordering::Wick);
        let mut a = a0.clone();
        let cap = 2 * self.order + 4;
        for _ in 0..cap {
            let inner = self.conn.apply(&a).add(&self.r.bracket_over_t(&a));
            let next = a0.sub(&inner.delta_inverse());
            if next == a {
                self.eta_cache
                    .lock()
                    .expect("cache poisoned")
                    .insert(f.clone(), a.clone());
                return Ok(a);
            }
            a = next;
        }
        Err(EngineError::NonConvergence(format!(
            "flat section did not stabilize after {} passes",
            cap
        )))
    }

    /// `σ(η(f) ∘ η(g))`.
    pub fn star(&self, f: &TSeries, g: &TSeries) -> Result<TSeries, EngineError> {
        Ok(sigma_product(&self.eta(f)?, &self.eta(g)?))
    }

    /// Reconstructs the operator table of `μ(f, g) = σ(η(f)∘η(g))` from its
    /// values on monomials of degree `<= max_poly_degree`.
    pub fn extract_star_product(&self, max_poly_degree: u32) -> Result<StarProduct, EngineError> {
        let n = self.n();
        let order = self.order;
        let monos = monomials_up_to(2 * n, max_poly_degree);
        let mut etas = Vec::with_capacity(monos.len());
        for m in &monos {
            let p = ChartPoly::monomial(n, m.clone(), Scalar::one());
            etas.push(self.eta(&TSeries::from_poly(p, order))?);
        }
        let table = reconstruct_table(n, order, max_poly_degree, |i, j| {
            Ok(sigma_product(&etas[i], &etas[j]))
        })?;
        Ok(StarProduct::from_table(table, "fedosov"))
    }

    /// Finds `B` with `F^T(B) >= 3` such that conjugating this connection by
    /// `exp((1/t) ad B)` gives `other`.
    pub fn gauge_between(&self, other: &FedosovConnection) -> Result<FiberElement, EngineError> {
        if self.order != other.order || self.n() != other.n() {
            return Err(EngineError::Precondition(
                "connections live on different charts".into(),
            ));
        }
        let (w1, _) = self.curvatures()?;
        let (w2, _) = other.curvatures()?;
        if w1 != w2 {
            return Err(EngineError::Precondition("Wick curvatures differ".into()));
        }
        let a1 = self.connection_form();
        let a2 = other.connection_form();
        let bound = 2 * self.order as u32 + 1;
        let mut b = FiberElement::zero(self.n(), self.order, Ordering::Wick);
        for _ in 0..=bound + 1 {
            let res = gauge_transform(&a1, &b)
                .sub(&a2)
                .non_central_part()
                .truncate_t(bound);
            let low = match res.min_t_degree() {
                None => return Ok(b),
                Some(d) => res.t_part(d),
            };
            b = b.add(&low.delta_inverse());
        }
        Err(EngineError::NonConvergence(
            "gauge element did not stabilize".into(),
        ))
    }

    /// The connection `exp((1/t) ad C) D exp(−(1/t) ad C)`.
    pub fn from_gauge(&self, c: &FiberElement) -> Result<FedosovConnection, EngineError> {
        if !c.in_ft(3) {
            return Err(EngineError::Precondition(
                "gauge element needs F^T >= 3".into(),
            ));
        }
        let hi = self.order + 1;
        let gamma = self.christoffel().with_order(hi);
        let big = FedosovConnection::build(&gamma)?;
        let a = gauge_transform(&big.connection_form(), &c.with_order(hi));
        let n = self.n();
        let r = a
            .sub(big.conn.gamma_hat(Ordering::Wick))
            .sub(&FiberElement::delta_tilde(n, hi, Ordering::Wick))
            .with_order(self.order);
        Ok(FedosovConnection::from_parts(self.conn.clone(), r))
    }
}

/// Recovers a bidifferential table from its values `value(i, j)` on the
/// pair of monomials `(z^{α_i}, z^{α_j})` of degree `<= max_degree`, listed as
/// in `monomials_up_to`. The derivative order at `t^k` must not exceed `k`.
pub fn reconstruct_table(
    n: usize,
    order: usize,
    max_degree: u32,
    value: impl Fn(usize, usize) -> Result<TSeries, EngineError>,
) -> Result<DiffSeries, EngineError> {
    let monos = monomials_up_to(2 * n, max_degree);
    let mut pairs: Vec<(usize, usize)> = (0..monos.len())
        .flat_map(|i| (0..monos.len()).map(move |j| (i, j)))
        .collect();
    let deg = |m: &Mono| m.iter().sum::<u32>();
    pairs.sort_by_key(|&(i, j)| deg(&monos[i]) + deg(&monos[j]));
    let mut coeffs: BTreeMap<(Mono, Mono), TSeries> = BTreeMap::new();
    for (i, j) in pairs {
        let (al, be) = (&monos[i], &monos[j]);
        let mut val = value(i, j)?;
        for ((a2, b2), c) in &coeffs {
            if !le(a2, al) || !le(b2, be) {
                continue;
            }
            let fa = falling_monomial(n, al, a2);
            let fb = falling_monomial(n, be, b2);
            val.sub_assign_ref(&c.mul_poly(&fa.mul_ref(&fb)));
        }
        if val.is_zero() {
            continue;
        }
        let norm = &factorial_mono(al) * &factorial_mono(be);
        let c = val.scale(&norm.inv().expect("nonzero factorial"));
        coeffs.insert((al.clone(), be.clone()), c);
    }
    let mut table = DiffSeries::zero(n, order, 2);
    for ((a, b), c) in coeffs {
        for (k, p) in c.coeffs().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if deg(&a) > k as u32 || deg(&b) > k as u32 {
                return Err(EngineError::Precondition(format!(
                    "derivative order exceeds {} at t^{}",
                    k, k
                )));
            }
            table.part_mut(k).add_term(vec![a.clone(), b.clone()], p);
        }
    }
    Ok(table)
}

/// `e^{ad B/t} A − Σ_k (ad B/t)^k dB / (k+1)!`.
pub fn gauge_transform(a: &FiberElement, b: &FiberElement) -> FiberElement {
    let mut out = a.clone();
    let mut term = a.clone();
    let db = b.d_base();
    let mut dterm = db.clone();
    out = out.sub(&db);
    let mut k: u32 = 1;
    loop {
        term = b.bracket_over_t(&term).scale(&Scalar::frac(1, k as i64));
        dterm = b
            .bracket_over_t(&dterm)
            .scale(&Scalar::frac(1, (k + 1) as i64));
        if term.is_zero() && dterm.is_zero() {
            break;
        }
        out = out.add(&term).sub(&dterm);
        k += 1;
    }
    out
}

/// `e^{ad B/t} a`.
pub fn conjugate(a: &FiberElement, b: &FiberElement) -> FiberElement {
    let mut out = a.clone();
    let mut term = a.clone();
    let mut k: i64 = 1;
    loop {
        term = b.bracket_over_t(&term).scale(&Scalar::frac(1, k));
        if term.is_zero() {
            return out;
        }
        out = out.add(&term);
        k += 1;
    }
}

fn le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn factorial_mono(a: &[u32]) -> Scalar {
    let mut v: i64 = 1;
    for &e in a {
        v *= (1..=e as i64).product::<i64>();
    }
    Scalar::from_int(v)
}

/// `∂^{a2} z^{a} = (a!/(a−a2)!) z^{a−a2}`.
fn falling_monomial(n: usize, a: &[u32], a2: &[u32]) -> ChartPoly {
    let mut c: i64 = 1;
    let mut e = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(a2) {
        for j in 0..y {
            c *= (x - j) as i64;
        }
        e.push(x - y);
    }
    ChartPoly::monomial(n, e, Scalar::from_int(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::literal::parse_series;

    fn s(lit: &str, n: usize, order: usize) -> TSeries {
        parse_series(lit, n, order).unwrap()
    }

    fn sample(order: usize) -> ChristoffelData {
        ChristoffelData::from_lowered(
            1,
            order,
            &[(0, 0, 0, s("y", 1, order)), (0, 0, 1, s("y", 1, order))],
        )
    }

    #[test]
    fn flat_connection_has_zero_r() {
        let f = FedosovConnection::build(&ChristoffelData::flat(1, 3)).unwrap();
        assert!(f.r().is_zero());
        assert!(f.verify().all_passed());
    }

    #[test]
    fn non_flat_connection_satisfies_postconditions() {
        let f = FedosovConnection::build(&sample(3)).unwrap();
        assert!(!f.r().is_zero());
        let rep = f.verify();
        assert!(rep.all_passed(), "{:?}", rep);
    }

    #[test]
    fn first_iterate_is_minus_delta_inverse_curvature() {
        let f = FedosovConnection::build(&sample(2)).unwrap();
        let r3 = f
            .connection()
            .curvature_element(Ordering::Wick)
            .delta_inverse()
            .neg();
        assert_eq!(
            f.r().filter(|k| k.t_degree() == 3),
            r3.filter(|k| k.t_degree() == 3)
        );
    }

    #[test]
    fn eta_of_coordinate_on_flat_chart() {
        let f = FedosovConnection::build(&ChristoffelData::flat(1, 3)).unwrap();
        let e = f.eta(&s("x", 1, 3)).unwrap();
        let expect = FiberElement::scalar(&s("x", 1, 3), Ordering::Wick)
            .sub(&FiberElement::generator(1, 3, Ordering::Wick, 0));
        assert_eq!(e, expect);
        assert!(f.apply_d(&e).is_zero());
        assert_eq!(
            f.eta(&s("1", 1, 3)).unwrap(),
            FiberElement::scalar(&s("1", 1, 3), Ordering::Wick)
        );
    }

    #[test]
    fn sigma_fast_path_matches_product() {
        let f = FedosovConnection::build(&sample(3)).unwrap();
        let a = f.eta(&s("x*y^2 + y", 1, 3)).unwrap();
        let b = f.eta(&s("x^2*y", 1, 3)).unwrap();
        assert_eq!(sigma_product(&a, &b), a.mul(&b).sigma());
    }

    #[test]
    fn moyal_values() {
        let w = StarProduct::moyal_weyl(1, 2);
        let k = StarProduct::moyal_wick(1, 2);
        let x = ChartPoly::x(1, 0);
        let y = ChartPoly::y(1, 0);
        assert_eq!(w.eval_poly(&y, &x), s("x*y + t/2", 1, 2));
        assert_eq!(w.eval_poly(&x, &y), s("x*y - t/2", 1, 2));
        assert_eq!(k.eval_poly(&y, &x), s("x*y + t", 1, 2));
        assert_eq!(k.eval_poly(&x, &y), s("x*y", 1, 2));
    }

    #[test]
    fn flat_fedosov_is_moyal_wick() {
        let f = FedosovConnection::build(&ChristoffelData::flat(1, 3)).unwrap();
        let mu = f.extract_star_product(3).unwrap();
        assert_eq!(mu.table(), StarProduct::moyal_wick(1, 3).table());
    }

    #[test]
    fn curvature_identity_for_sample() {
        let f = FedosovConnection::build(&sample(2)).unwrap();
        let (wick, weyl) = f.curvatures().unwrap();
        let omega = BaseForm::standard_omega(1, 2);
        assert_eq!(wick, omega);
        let tr = f.christoffel().trace_form();
        assert!(!tr.is_zero());
        assert_eq!(weyl, omega.add(&tr.shift_up(1).scale(&Scalar::frac(1, 2))));
    }

    #[test]
    fn gauge_round_trip() {
        let order = 2;
        let f = FedosovConnection::build(&ChristoffelData::flat(1, order)).unwrap();
        let c = FiberElement::monomial(
            1,
            order,
            Ordering::Wick,
            vec![2, 2],
            0,
            0,
            ChartPoly::y(1, 0),
        );
        let g = f.from_gauge(&c).unwrap();
        assert!(g.verify().all_passed(), "{:?}", g.verify());
        let b = f.gauge_between(&g).unwrap();
        assert!(b.in_fp(1));
        for j in 0..2 {
            let z = FiberElement::generator(1, order, Ordering::Wick, j);
            let lhs = conjugate(&z, &b).truncate_t(2 * order as u32);
            let rhs = conjugate(&z, &c).truncate_t(2 * order as u32);
            assert_eq!(lhs, rhs);
        }
        assert!(f.gauge_between(&f).unwrap().is_zero());
    }
}
