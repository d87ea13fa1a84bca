//! Differential forms on the chart with truncated-series coefficients.
//!
//! A wedge monomial is a bitmask over the `2n` directions `dx_1..dx_n,
//! dy_1..dy_n`, read in increasing index order.

use super::poly::coord_name;
use super::scalar::Scalar;
use super::series::TSeries;
use crate::error::AlgebraError;
use std::collections::BTreeMap;
use std::fmt;

/// Wedge monomial over the `2n` coordinate differentials.
pub type Wedge = u32;

/// Sign of `dz^a ∧ dz^b` relative to the sorted monomial `dz^{a|b}`, or
/// `None` when they share a factor.
pub fn wedge_sign(a: Wedge, b: Wedge) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Directions of a wedge monomial in increasing order.
pub fn wedge_dirs(w: Wedge) -> Vec<usize> {
    (0..32).filter(|&j| w & (1 << j) != 0).collect()
}

/// Text key such as `dx1^dy1`; `1` for the empty monomial.
pub fn wedge_key(n: usize, w: Wedge) -> String {
    if w == 0 {
        return "1".to_string();
    }
    wedge_dirs(w)
        .into_iter()
        .map(|j| format!("d{}", coord_name(n, j)))
        .collect::<Vec<_>>()
        .join("^")
}

/// Inverse of [`wedge_key`].
pub fn parse_wedge_key(n: usize, key: &str) -> Option<Wedge> {
    if key == "1" {
        return Some(0);
    }
    let mut w: Wedge = 0;
    let mut last: Option<usize> = None;
    for part in key.split('^') {
        let name = part.trim().strip_prefix('d')?;
        let j = super::literal::coord_index(name, n)?;
        if let Some(l) = last {
            if j <= l {
                return None;
            }
        }
        last = Some(j);
        w |= 1 << j;
    }
    Some(w)
}

/// A differential form, possibly of mixed degree.
#[derive(Clone, PartialEq, Eq)]
pub struct BaseForm {
    n: usize,
    order: usize,
    terms: BTreeMap<Wedge, TSeries>,
}

impl BaseForm {
    pub fn zero(n: usize, order: usize) -> Self {
        BaseForm {
            n,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(f: TSeries) -> Self {
        let mut out = BaseForm::zero(f.n(), f.order());
        out.add_term(0, &f);
        out
    }

    /// `c · dz^w`.
    pub fn monomial(w: Wedge, c: TSeries) -> Self {
        let mut out = BaseForm::zero(c.n(), c.order());
        out.add_term(w, &c);
        out
    }

    /// The coordinate differential `dz_j`.
    pub fn dz(n: usize, order: usize, j: usize) -> Self {
        BaseForm::monomial(1 << j, TSeries::one(n, order))
    }

    /// The standard symplectic form `Σ dy_i ∧ dx_i`.
    pub fn standard_omega(n: usize, order: usize) -> Self {
        let mut out = BaseForm::zero(n, order);
        for i in 0..n {
            out.add_term((1 << i) | (1 << (n + i)), &TSeries::one(n, order).neg());
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Wedge, &TSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: Wedge) -> TSeries {
        self.terms
            .get(&w)
            .cloned()
            .unwrap_or_else(|| TSeries::zero(self.n, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a homogeneous form; `None` for zero or mixed degree.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|w| w.count_ones() as usize);
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Component of wedge degree `k`.
    pub fn part(&self, k: usize) -> BaseForm {
        BaseForm {
            n: self.n,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.count_ones() as usize == k)
                .map(|(w, c)| (*w, c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, w: Wedge, c: &TSeries) {
        assert_eq!(c.n(), self.n, "chart dimension mismatch");
        assert_eq!(c.order(), self.order, "truncation order mismatch");
        if c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry(w)
            .or_insert_with(|| TSeries::zero(self.n, self.order));
        e.add_assign_ref(c);
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    fn check(&self, o: &BaseForm) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        assert_eq!(self.order, o.order, "truncation order mismatch");
    }

    pub fn add(&self, o: &BaseForm) -> BaseForm {
        self.check(o);
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(*w, c);
        }
        out
    }

    pub fn sub(&self, o: &BaseForm) -> BaseForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> BaseForm {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> BaseForm {
        self.map(|c| c.scale(s))
    }

    /// Multiplication by a function.
    pub fn mul_series(&self, f: &TSeries) -> BaseForm {
        self.map(|c| c.mul(f))
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> BaseForm {
        self.map(|c| c.shift_up(k))
    }

    /// Applies `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&TSeries) -> TSeries) -> BaseForm {
        let mut out = BaseForm::zero(self.n, self.order);
        for (w, c) in &self.terms {
            out.add_term(*w, &f(c));
        }
        out
    }

    /// Coefficient of `t^k` as a form with `t`-free coefficients.
    pub fn t_coeff(&self, k: usize) -> BaseForm {
        self.map(|c| TSeries::from_poly(c.coeff(k).clone(), self.order))
    }

    pub fn wedge(&self, o: &BaseForm) -> BaseForm {
        self.check(o);
        let mut out = BaseForm::zero(self.n, self.order);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &o.terms {
                if let Some(s) = wedge_sign(*wa, *wb) {
                    out.add_term(wa | wb, &ca.mul(cb).scale(&Scalar::from_int(s)));
                }
            }
        }
        out
    }

    /// Checked wedge product; fails when the degree would exceed `2n`.
    pub fn checked_wedge(&self, o: &BaseForm) -> Result<BaseForm, AlgebraError> {
        if self.n != o.n {
            return Err(AlgebraError::DimensionMismatch(self.n, o.n));
        }
        if self.order != o.order {
            return Err(AlgebraError::OrderMismatch(self.order, o.order));
        }
        let da = self.terms.keys().map(|w| w.count_ones()).max().unwrap_or(0) as usize;
        let db = o.terms.keys().map(|w| w.count_ones()).max().unwrap_or(0) as usize;
        if !self.is_zero() && !o.is_zero() && da + db > 2 * self.n {
            return Err(AlgebraError::DegreeOverflow(da + db, 2 * self.n));
        }
        Ok(self.wedge(o))
    }

    /// Exterior derivative.
    pub fn d(&self) -> BaseForm {
        let mut out = BaseForm::zero(self.n, self.order);
        for (w, c) in &self.terms {
            for j in 0..2 * self.n {
                if w & (1 << j) != 0 {
                    continue;
                }
                let dc = c.partial(j);
                if dc.is_zero() {
                    continue;
                }
                let s = wedge_sign(1 << j, *w).unwrap();
                out.add_term(w | (1 << j), &dc.scale(&Scalar::from_int(s)));
            }
        }
        out
    }

    /// Interior product with the vector field `Σ X^j ∂_j`.
    pub fn contract(&self, x: &[TSeries]) -> BaseForm {
        assert_eq!(x.len(), 2 * self.n, "one component per direction");
        let mut out = BaseForm::zero(self.n, self.order);
        for (w, c) in &self.terms {
            for (pos, j) in wedge_dirs(*w).into_iter().enumerate() {
                if x[j].is_zero() {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                out.add_term(w & !(1 << j), &c.mul(&x[j]).scale(&Scalar::from_int(sign)));
            }
        }
        out
    }

    /// Pullback along the map `z_i ↦ subs[i]`.
    pub fn pullback(&self, subs: &[TSeries]) -> BaseForm {
        assert_eq!(subs.len(), 2 * self.n, "one substitution per coordinate");
        let tn = subs[0].n();
        let differentials: Vec<BaseForm> = subs
            .iter()
            .map(|s| {
                let mut f = BaseForm::zero(tn, self.order);
                for j in 0..2 * tn {
                    f.add_term(1 << j, &s.partial(j));
                }
                f
            })
            .collect();
        let mut out = BaseForm::zero(tn, self.order);
        for (w, c) in &self.terms {
            let mut acc = BaseForm::function(c.compose(subs));
            for j in wedge_dirs(*w) {
                acc = acc.wedge(&differentials[j]);
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.d().is_zero()
    }

    /// Membership in `P^⊥`: every monomial is built from `dx` factors only.
    pub fn in_p_perp(&self) -> bool {
        let ymask: Wedge = ((1 << self.n) - 1) << self.n;
        self.terms.keys().all(|w| w & ymask == 0)
    }

    /// Membership of a 2-form in `d(P^⊥)`: closed with no `dy ∧ dy` monomials.
    pub fn in_dp_perp(&self) -> bool {
        let ymask: Wedge = ((1 << self.n) - 1) << self.n;
        self.is_closed() && self.terms.keys().all(|w| (w & ymask).count_ones() <= 1)
    }

    /// The same form at a different truncation order.
    pub fn with_order(&self, order: usize) -> BaseForm {
        let mut out = BaseForm::zero(self.n, order);
        for (w, c) in &self.terms {
            out.add_term(*w, &c.with_order(order));
        }
        out
    }

    /// Deterministic `(key, literal)` pairs.
    pub fn to_entries(&self) -> Vec<(String, String)> {
        self.terms
            .iter()
            .map(|(w, c)| (wedge_key(self.n, *w), c.to_literal()))
            .collect()
    }

    /// Canonical text such as `(-1)*dx1^dy1 + (t*x1)*dx1`.
    pub fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| {
                if *w == 0 {
                    format!("({})", c.to_literal())
                } else {
                    format!("({})*{}", c.to_literal(), wedge_key(self.n, *w))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for BaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Display for BaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}
