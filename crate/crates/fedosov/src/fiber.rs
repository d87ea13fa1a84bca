//! The Fedosov algebra `W ⊗ Λ` over the chart.
//!
//! Fiber generators `x̂_1..x̂_n, ŷ_1..ŷ_n` share the chart's index layout, so
//! `ẑ_j` is the fiber copy of `dz_j`. An element is a finite sum of
//! `c(z) · t^k · ẑ^e ⊗ dz^w` with the form factor on the right; forms commute
//! with fiber generators. The Wick tag reads `ẑ^e` with every `x̂` to the left
//! of every `ŷ`; the Weyl tag reads it as the symmetrized product.
//!
//! Every term carries `T = |e| + 2k`. Terms with `T > 2N + 2` or `k > N` are
//! discarded on insertion; every product adds `T`-degrees and every contraction
//! trades two generators for one `t`, so no kept coefficient ever depends on a
//! discarded one.

use crate::algebra::form::{wedge_dirs, wedge_sign, BaseForm, Wedge};
use crate::algebra::poly::ChartPoly;
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::error::AlgebraError;
use std::collections::BTreeMap;
use std::fmt;

/// How a fiber monomial is read as an element of the Weyl algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ordering {
    Wick,
    Weyl,
}

/// Index of one stored term: fiber exponents, wedge monomial, power of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FKey {
    pub fib: Vec<u32>,
    pub wedge: Wedge,
    pub tp: u32,
}

impl FKey {
    pub fn fiber_degree(&self) -> u32 {
        self.fib.iter().sum()
    }

    /// Total degree: fiber degree plus twice the power of `t`.
    pub fn t_degree(&self) -> u32 {
        self.fiber_degree() + 2 * self.tp
    }

    /// Number of `x̂` factors.
    pub fn p_degree(&self, n: usize) -> u32 {
        self.fib[..n].iter().sum()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiberElement {
    n: usize,
    order: usize,
    tag: Ordering,
    terms: BTreeMap<FKey, ChartPoly>,
}

fn binom(a: u32, b: u32) -> i64 {
    let mut r: i64 = 1;
    for k in 0..b {
        r = r * (a - k) as i64 / (k + 1) as i64;
    }
    r
}

fn factorial(a: u32) -> i64 {
    (1..=a as i64).product()
}

/// Every multi-index `γ` with `γ_i <= bound_i`.
fn boxes(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(bound.len())];
    for &b in bound {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for v in &out {
            for k in 0..=b {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

impl FiberElement {
    pub fn zero(n: usize, order: usize, tag: Ordering) -> Self {
        FiberElement {
            n,
            order,
            tag,
            terms: BTreeMap::new(),
        }
    }

    /// The element `f · 1`.
    pub fn scalar(f: &TSeries, tag: Ordering) -> Self {
        let mut out = FiberElement::zero(f.n(), f.order(), tag);
        let z = vec![0; 2 * f.n()];
        for (k, c) in f.coeffs().iter().enumerate() {
            out.add_term(
                FKey {
                    fib: z.clone(),
                    wedge: 0,
                    tp: k as u32,
                },
                c,
            );
        }
        out
    }

    /// The scalar-fiber element carrying a base form.
    pub fn from_form(a: &BaseForm, tag: Ordering) -> Self {
        let mut out = FiberElement::zero(a.n(), a.order(), tag);
        let z = vec![0; 2 * a.n()];
        for (w, c) in a.terms() {
            for (k, p) in c.coeffs().iter().enumerate() {
                out.add_term(
                    FKey {
                        fib: z.clone(),
                        wedge: *w,
                        tp: k as u32,
                    },
                    p,
                );
            }
        }
        out
    }

    /// The generator `ẑ_j` (`x̂` for `j < n`, `ŷ` otherwise).
    pub fn generator(n: usize, order: usize, tag: Ordering, j: usize) -> Self {
        let mut fib = vec![0; 2 * n];
        fib[j] = 1;
        FiberElement::monomial(n, order, tag, fib, 0, 0, ChartPoly::one(n))
    }

    pub fn monomial(
        n: usize,
        order: usize,
        tag: Ordering,
        fib: Vec<u32>,
        wedge: Wedge,
        tp: u32,
        c: ChartPoly,
    ) -> Self {
        let mut out = FiberElement::zero(n, order, tag);
        out.add_term(FKey { fib, wedge, tp }, &c);
        out
    }

    /// `δ̃ = Σ_i (ŷ_i ⊗ dx_i − x̂_i ⊗ dy_i)`, so that `δ = (1/t) ad δ̃`.
    pub fn delta_tilde(n: usize, order: usize, tag: Ordering) -> Self {
        let mut out = FiberElement::zero(n, order, tag);
        for i in 0..n {
            let mut fy = vec![0; 2 * n];
            fy[n + i] = 1;
            out.add_term(
                FKey {
                    fib: fy,
                    wedge: 1 << i,
                    tp: 0,
                },
                &ChartPoly::one(n),
            );
            let mut fx = vec![0; 2 * n];
            fx[i] = 1;
            out.add_term(
                FKey {
                    fib: fx,
                    wedge: 1 << (n + i),
                    tp: 0,
                },
                &-&ChartPoly::one(n),
            );
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tag(&self) -> Ordering {
        self.tag
    }

    /// Largest stored total degree.
    pub fn t_bound(&self) -> u32 {
        2 * self.order as u32 + 2
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FKey, &ChartPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `ẑ^fib ⊗ dz^wedge` as a series in `t`.
    pub fn coeff(&self, fib: &[u32], wedge: Wedge) -> TSeries {
        let mut cs = vec![ChartPoly::zero(self.n); self.order + 1];
        for (k, c) in cs.iter_mut().enumerate() {
            let key = FKey {
                fib: fib.to_vec(),
                wedge,
                tp: k as u32,
            };
            if let Some(p) = self.terms.get(&key) {
                *c = p.clone();
            }
        }
        TSeries::from_coeffs(self.n, self.order, cs)
    }

    pub fn add_term(&mut self, key: FKey, c: &ChartPoly) {
        if c.is_zero() || key.tp as usize > self.order || key.t_degree() > self.t_bound() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    fn check(&self, o: &FiberElement) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        assert_eq!(self.order, o.order, "truncation order mismatch");
        assert_eq!(self.tag, o.tag, "ordering tag mismatch");
    }

    /// Checked compatibility for API boundaries.
    pub fn check_compatible(&self, o: &FiberElement) -> Result<(), AlgebraError> {
        if self.n != o.n {
            return Err(AlgebraError::DimensionMismatch(self.n, o.n));
        }
        if self.order != o.order {
            return Err(AlgebraError::OrderMismatch(self.order, o.order));
        }
        if self.tag != o.tag {
            return Err(AlgebraError::TagMismatch);
        }
        Ok(())
    }

    pub fn add_assign_ref(&mut self, o: &FiberElement) {
        self.check(o);
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c);
        }
    }

    pub fn add(&self, o: &FiberElement) -> FiberElement {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }

    pub fn sub(&self, o: &FiberElement) -> FiberElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> FiberElement {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> FiberElement {
        self.map_terms(|k, c| vec![(k.clone(), c.scale(s))])
    }

    /// Multiplication by a function of the base point and `t`.
    pub fn mul_series(&self, f: &TSeries) -> FiberElement {
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            for (j, p) in f.coeffs().iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let mut key = k.clone();
                key.tp += j as u32;
                out.add_term(key, &c.mul_ref(p));
            }
        }
        out
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, s: u32) -> FiberElement {
        self.map_terms(|k, c| {
            let mut key = k.clone();
            key.tp += s;
            vec![(key, c.clone())]
        })
    }

    /// Rewrites every term through `f`.
    pub fn map_terms(
        &self,
        f: impl Fn(&FKey, &ChartPoly) -> Vec<(FKey, ChartPoly)>,
    ) -> FiberElement {
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            for (k2, c2) in f(k, c) {
                out.add_term(k2, &c2);
            }
        }
        out
    }

    /// Terms satisfying a predicate.
    pub fn filter(&self, f: impl Fn(&FKey) -> bool) -> FiberElement {
        FiberElement {
            n: self.n,
            order: self.order,
            tag: self.tag,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| f(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms of total degree at most `bound`.
    pub fn truncate_t(&self, bound: u32) -> FiberElement {
        self.filter(|k| k.t_degree() <= bound)
    }

    /// Terms of total degree exactly `d`.
    pub fn t_part(&self, d: u32) -> FiberElement {
        self.filter(|k| k.t_degree() == d)
    }

    /// Component of wedge degree `q`.
    pub fn wedge_part(&self, q: u32) -> FiberElement {
        self.filter(|k| k.wedge.count_ones() == q)
    }

    /// Fiber-degree-zero part; it is central for both products.
    pub fn central_part(&self) -> FiberElement {
        self.filter(|k| k.fiber_degree() == 0)
    }

    pub fn non_central_part(&self) -> FiberElement {
        self.filter(|k| k.fiber_degree() != 0)
    }

    pub fn is_central(&self) -> bool {
        self.terms.keys().all(|k| k.fiber_degree() == 0)
    }

    /// The fiber-degree-zero part as a base form.
    pub fn central_form(&self) -> BaseForm {
        let mut out = BaseForm::zero(self.n, self.order);
        for (k, c) in &self.terms {
            if k.fiber_degree() == 0 {
                let mut cs = vec![ChartPoly::zero(self.n); self.order + 1];
                cs[k.tp as usize] = c.clone();
                out.add_term(k.wedge, &TSeries::from_coeffs(self.n, self.order, cs));
            }
        }
        out
    }

    /// Minimum `T`-degree over stored terms; `None` for zero.
    pub fn min_t_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.t_degree()).min()
    }

    /// Minimum number of `x̂` factors over stored terms; `None` for zero.
    pub fn min_p_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.p_degree(self.n)).min()
    }

    /// Whether every term lies in `F^T_k`.
    pub fn in_ft(&self, k: u32) -> bool {
        self.min_t_degree().map_or(true, |d| d >= k)
    }

    /// Whether every term lies in `F^P_k`.
    pub fn in_fp(&self, k: u32) -> bool {
        self.min_p_degree().map_or(true, |d| d >= k)
    }

    /// Whether the element contains no `ŷ` factors.
    pub fn is_p_only(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.fib[self.n..].iter().all(|&v| v == 0))
    }

    fn parity_split(&self) -> (FiberElement, FiberElement) {
        (
            self.filter(|k| k.wedge.count_ones() % 2 == 0),
            self.filter(|k| k.wedge.count_ones() % 2 == 1),
        )
    }

    /// Core contraction loop. Sums the contraction terms of `a∘b` whose
    /// number of contractions is at least `min_contr`, multiplied by
    /// `t^{-tdrop}`.
    fn contract(a: &FiberElement, b: &FiberElement, min_contr: u32, tdrop: u32) -> FiberElement {
        a.check(b);
        let n = a.n;
        let mut out = FiberElement::zero(n, a.order, a.tag);
        let bound = out.t_bound() + 2 * tdrop;
        let bt: Vec<(&FKey, &ChartPoly, u32)> =
            b.terms.iter().map(|(k, c)| (k, c, k.t_degree())).collect();
        for (ka, ca) in &a.terms {
            let ta = ka.t_degree();
            for &(kb, cb, tb) in &bt {
                if ta + tb > bound {
                    continue;
                }
                let sign = match wedge_sign(ka.wedge, kb.wedge) {
                    Some(s) => s,
                    None => continue,
                };
                let mut prod: Option<ChartPoly> = None;
                let wedge = ka.wedge | kb.wedge;
                match a.tag {
                    Ordering::Wick => {
                        let bounds: Vec<u32> =
                            (0..n).map(|i| ka.fib[n + i].min(kb.fib[i])).collect();
                        for g in boxes(&bounds) {
                            let gs: u32 = g.iter().sum();
                            if gs < min_contr {
                                continue;
                            }
                            let tp = ka.tp + kb.tp + gs - tdrop;
                            if tp as usize > a.order {
                                continue;
                            }
                            let mut coef: i64 = sign;
                            let mut fib = vec![0; 2 * n];
                            for i in 0..n {
                                coef *= binom(ka.fib[n + i], g[i])
                                    * binom(kb.fib[i], g[i])
                                    * factorial(g[i]);
                                fib[i] = ka.fib[i] + kb.fib[i] - g[i];
                                fib[n + i] = ka.fib[n + i] - g[i] + kb.fib[n + i];
                            }
                            let p = prod.get_or_insert_with(|| ca.mul_ref(cb));
                            out.add_term(
                                FKey { fib, wedge, tp },
                                &p.scale(&Scalar::from_int(coef)),
                            );
                        }
                    }
                    Ordering::Weyl => {
                        let gb: Vec<u32> = (0..n).map(|i| ka.fib[n + i].min(kb.fib[i])).collect();
                        let eb: Vec<u32> = (0..n).map(|i| ka.fib[i].min(kb.fib[n + i])).collect();
                        let gammas = boxes(&gb);
                        let epss = boxes(&eb);
                        for g in &gammas {
                            for e in &epss {
                                let c: u32 = g.iter().sum::<u32>() + e.iter().sum::<u32>();
                                if c < min_contr {
                                    continue;
                                }
                                let tp = ka.tp + kb.tp + c - tdrop;
                                if tp as usize > a.order {
                                    continue;
                                }
                                let mut num: i64 = sign;
                                let mut fib = vec![0; 2 * n];
                                for i in 0..n {
                                    num *= binom(ka.fib[n + i], g[i])
                                        * binom(kb.fib[i], g[i])
                                        * factorial(g[i])
                                        * binom(ka.fib[i], e[i])
                                        * binom(kb.fib[n + i], e[i])
                                        * factorial(e[i]);
                                    fib[i] = ka.fib[i] - e[i] + kb.fib[i] - g[i];
                                    fib[n + i] = ka.fib[n + i] - g[i] + kb.fib[n + i] - e[i];
                                }
                                let esum: u32 = e.iter().sum();
                                if esum % 2 == 1 {
                                    num = -num;
                                }
                                let coef = Scalar::frac(num, 1i64 << c);
                                let p = prod.get_or_insert_with(|| ca.mul_ref(cb));
                                out.add_term(FKey { fib, wedge, tp }, &p.scale(&coef));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The product of the tag: Wick contraction `Σ t^{|γ|}/γ! ∂_ŷ^γ a ∂_x̂^γ b`,
    /// or the antisymmetric Weyl contraction with weight `t/2`.
    pub fn mul(&self, o: &FiberElement) -> FiberElement {
        FiberElement::contract(self, o, 0, 0)
    }

    pub fn checked_mul(&self, o: &FiberElement) -> Result<FiberElement, AlgebraError> {
        self.check_compatible(o)?;
        Ok(self.mul(o))
    }

    /// Graded commutator `[a, b] = a∘b − (−1)^{|a||b|} b∘a`.
    pub fn bracket(&self, o: &FiberElement) -> FiberElement {
        self.bracket_over_t(o).shift_up(1)
    }

    /// `(1/t)[a, b]`, computed from the contraction terms directly so that no
    /// coefficient is lost to truncation.
    pub fn bracket_over_t(&self, o: &FiberElement) -> FiberElement {
        let (ae, ao) = self.parity_split();
        let (be, bo) = o.parity_split();
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (a, b, sign) in [(&ae, &be, 1), (&ae, &bo, 1), (&ao, &be, 1), (&ao, &bo, -1)] {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            out.add_assign_ref(&FiberElement::contract(a, b, 1, 1));
            let ba = FiberElement::contract(b, a, 1, 1);
            out.add_assign_ref(&ba.scale(&Scalar::from_int(-sign)));
        }
        out
    }

    /// `∂/∂ẑ_j`.
    pub fn fiber_partial(&self, j: usize) -> FiberElement {
        self.map_terms(|k, c| {
            if k.fib[j] == 0 {
                return vec![];
            }
            let mut key = k.clone();
            key.fib[j] -= 1;
            vec![(key, c.scale(&Scalar::from_int(k.fib[j] as i64)))]
        })
    }

    /// `δ = Σ_j dz_j ∧ ∂/∂ẑ_j`.
    pub fn delta(&self) -> FiberElement {
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            for j in 0..2 * self.n {
                if k.fib[j] == 0 {
                    continue;
                }
                let s = match wedge_sign(1 << j, k.wedge) {
                    Some(s) => s,
                    None => continue,
                };
                let mut key = k.clone();
                key.fib[j] -= 1;
                key.wedge |= 1 << j;
                out.add_term(key, &c.scale(&Scalar::from_int(s * k.fib[j] as i64)));
            }
        }
        out
    }

    /// `δ* = Σ_j ẑ_j · ι(∂_j)`.
    pub fn delta_star(&self) -> FiberElement {
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            for (pos, j) in wedge_dirs(k.wedge).into_iter().enumerate() {
                let s = if pos % 2 == 0 { 1 } else { -1 };
                let mut key = k.clone();
                key.fib[j] += 1;
                key.wedge &= !(1 << j);
                out.add_term(key, &c.scale(&Scalar::from_int(s)));
            }
        }
        out
    }

    /// `δ⁻¹`: `δ*/(p + r + q)` on monomials of fiber degree `p + r` and wedge
    /// degree `q`, zero on scalars. Defined for the Wick tag.
    pub fn delta_inverse(&self) -> FiberElement {
        assert_eq!(self.tag, Ordering::Wick, "δ⁻¹ is defined on Wick symbols");
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            let deg = k.fiber_degree() + k.wedge.count_ones();
            if deg == 0 || k.wedge == 0 {
                continue;
            }
            let inv = Scalar::frac(1, deg as i64);
            for (pos, j) in wedge_dirs(k.wedge).into_iter().enumerate() {
                let s = if pos % 2 == 0 { inv.clone() } else { -&inv };
                let mut key = k.clone();
                key.fib[j] += 1;
                key.wedge &= !(1 << j);
                out.add_term(key, &c.scale(&s));
            }
        }
        out
    }

    /// `σ`: the coefficient of fiber degree 0 and wedge degree 0.
    pub fn sigma(&self) -> TSeries {
        self.coeff(&vec![0; 2 * self.n], 0)
    }

    /// Exterior derivative along the base: `Σ_j dz_j ∧ ∂_j` on coefficients.
    pub fn d_base(&self) -> FiberElement {
        let mut out = FiberElement::zero(self.n, self.order, self.tag);
        for (k, c) in &self.terms {
            for j in 0..2 * self.n {
                let s = match wedge_sign(1 << j, k.wedge) {
                    Some(s) => s,
                    None => continue,
                };
                let dc = c.partial(j);
                if dc.is_zero() {
                    continue;
                }
                let mut key = k.clone();
                key.wedge |= 1 << j;
                out.add_term(key, &dc.scale(&Scalar::from_int(s)));
            }
        }
        out
    }

    /// `exp(s · (t/2) Σ_i ∂_{x̂_i} ∂_{ŷ_i})` on symbols.
    fn laplace_exp(&self, s: i64) -> FiberElement {
        let n = self.n;
        let mut out = FiberElement::zero(n, self.order, self.tag);
        for (k, c) in &self.terms {
            let bounds: Vec<u32> = (0..n).map(|i| k.fib[i].min(k.fib[n + i])).collect();
            for g in boxes(&bounds) {
                let m: u32 = g.iter().sum();
                let mut num: i64 = if s < 0 && m % 2 == 1 { -1 } else { 1 };
                let mut fib = k.fib.clone();
                for i in 0..n {
                    num *= binom(k.fib[i], g[i]) * binom(k.fib[n + i], g[i]) * factorial(g[i]);
                    fib[i] -= g[i];
                    fib[n + i] -= g[i];
                }
                let coef = Scalar::frac(num, 1i64 << m);
                out.add_term(
                    FKey {
                        fib,
                        wedge: k.wedge,
                        tp: k.tp + m,
                    },
                    &c.scale(&coef),
                );
            }
        }
        out
    }

    /// The same element written in another ordering.
    pub fn reorder(&self, target: Ordering) -> FiberElement {
        if target == self.tag {
            return self.clone();
        }
        let s = match target {
            Ordering::Weyl => -1,
            Ordering::Wick => 1,
        };
        let mut out = self.laplace_exp(s);
        out.tag = target;
        out
    }

    /// The same symbol read in another ordering (no rewriting).
    pub fn retag(&self, tag: Ordering) -> FiberElement {
        let mut out = self.clone();
        out.tag = tag;
        out
    }

    /// `Σ_i ∂_{x̂_i} ∂_{ŷ_i}` on symbols.
    pub fn trace_contraction(&self) -> FiberElement {
        let n = self.n;
        let mut out = FiberElement::zero(n, self.order, self.tag);
        for i in 0..n {
            out.add_assign_ref(&self.fiber_partial(i).fiber_partial(n + i));
        }
        out
    }

    /// The same element at a different truncation order.
    pub fn with_order(&self, order: usize) -> FiberElement {
        let mut out = FiberElement::zero(self.n, order, self.tag);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    /// Readable text form, one term per summand.
    pub fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let n = self.n;
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut f = Vec::new();
            if k.tp == 1 {
                f.push("t".to_string());
            } else if k.tp > 1 {
                f.push(format!("t^{}", k.tp));
            }
            for (j, &e) in k.fib.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if j < n {
                    format!("X{}", j + 1)
                } else {
                    format!("Y{}", j - n + 1)
                };
                f.push(if e == 1 {
                    name
                } else {
                    format!("{}^{}", name, e)
                });
            }
            if k.wedge != 0 {
                f.push(crate::algebra::form::wedge_key(n, k.wedge));
            }
            parts.push(format!(
                "({})*{}",
                c.to_literal(),
                if f.is_empty() {
                    "1".into()
                } else {
                    f.join("*")
                }
            ));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for FiberElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] {}", self.tag, self.to_literal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 3;

    fn g(n: usize, tag: Ordering, j: usize) -> FiberElement {
        FiberElement::generator(n, N, tag, j)
    }

    fn t(n: usize, tag: Ordering) -> FiberElement {
        FiberElement::scalar(&TSeries::t(n, N), tag)
    }

    #[test]
    fn weyl_relation_in_both_tags() {
        for tag in [Ordering::Wick, Ordering::Weyl] {
            let x = g(1, tag, 0);
            let y = g(1, tag, 1);
            assert_eq!(y.mul(&x).sub(&x.mul(&y)), t(1, tag));
            let x2 = g(2, tag, 1);
            let y1 = g(2, tag, 2);
            assert!(g(2, tag, 0).bracket(&x2).is_zero());
            assert!(y1.bracket(&g(2, tag, 3)).is_zero());
            assert!(y1.bracket(&x2).is_zero());
        }
    }

    #[test]
    fn wick_normal_ordering() {
        let x = g(1, Ordering::Wick, 0);
        let y = g(1, Ordering::Wick, 1);
        let lhs = y.mul(&x.mul(&x));
        let expect =
            FiberElement::monomial(1, N, Ordering::Wick, vec![2, 1], 0, 0, ChartPoly::one(1))
                .add(&x.mul(&t(1, Ordering::Wick)).scale(&Scalar::from_int(2)));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn delta_examples() {
        let x = g(1, Ordering::Wick, 0);
        assert_eq!(
            x.delta(),
            FiberElement::from_form(&BaseForm::dz(1, N, 0), Ordering::Wick)
        );
        let xy = FiberElement::monomial(1, N, Ordering::Wick, vec![1, 1], 0, 0, ChartPoly::one(1));
        let expect =
            FiberElement::monomial(1, N, Ordering::Wick, vec![0, 1], 0b01, 0, ChartPoly::one(1))
                .add(&FiberElement::monomial(
                    1,
                    N,
                    Ordering::Wick,
                    vec![1, 0],
                    0b10,
                    0,
                    ChartPoly::one(1),
                ));
        assert_eq!(xy.delta(), expect);
    }

    #[test]
    fn delta_tilde_squares_to_t_omega() {
        for n in [1, 2] {
            let dt = FiberElement::delta_tilde(n, N, Ordering::Wick);
            let omega = FiberElement::from_form(&BaseForm::standard_omega(n, N), Ordering::Wick);
            assert_eq!(dt.mul(&dt), omega.shift_up(1));
        }
    }

    #[test]
    fn delta_is_inner() {
        let n = 2;
        let dt = FiberElement::delta_tilde(n, N, Ordering::Wick);
        for j in 0..2 * n {
            let a = g(n, Ordering::Wick, j);
            assert_eq!(dt.bracket_over_t(&a), a.delta());
        }
    }

    #[test]
    fn delta_inverse_basics() {
        let one = FiberElement::scalar(&TSeries::one(1, N), Ordering::Wick);
        assert!(one.delta_inverse().is_zero());
        let dx = FiberElement::from_form(&BaseForm::dz(1, N, 0), Ordering::Wick);
        assert_eq!(dx.delta_inverse(), g(1, Ordering::Wick, 0));
    }

    #[test]
    fn reorder_of_xy() {
        let xy = FiberElement::monomial(1, N, Ordering::Wick, vec![1, 1], 0, 0, ChartPoly::one(1));
        let w = xy.reorder(Ordering::Weyl);
        let half_t =
            FiberElement::scalar(&TSeries::t(1, N).scale(&Scalar::frac(1, 2)), Ordering::Weyl);
        assert_eq!(w, xy.retag(Ordering::Weyl).sub(&half_t));
        assert_eq!(w.reorder(Ordering::Wick), xy);
    }

    #[test]
    fn sigma_of_function_times_element() {
        let f = TSeries::from_poly(ChartPoly::x(1, 0), N);
        let a = FiberElement::scalar(&f, Ordering::Wick);
        let b = g(1, Ordering::Wick, 1).mul(&g(1, Ordering::Wick, 0));
        assert_eq!(a.mul(&b).sigma(), f.mul(&b.sigma()));
        assert!(g(1, Ordering::Wick, 0).sigma().is_zero());
    }
}
