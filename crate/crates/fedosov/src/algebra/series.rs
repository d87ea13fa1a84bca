//! Truncated power series in the deformation parameter `t` with polynomial
//! coefficients. All arithmetic is performed modulo `t^{N+1}`.

use super::poly::ChartPoly;
use super::scalar::Scalar;
use crate::error::AlgebraError;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TSeries {
    n: usize,
    coeffs: Vec<ChartPoly>,
}

impl TSeries {
    pub fn zero(n: usize, order: usize) -> Self {
        TSeries {
            n,
            coeffs: vec![ChartPoly::zero(n); order + 1],
        }
    }

    pub fn from_poly(p: ChartPoly, order: usize) -> Self {
        let mut s = TSeries::zero(p.n(), order);
        s.coeffs[0] = p;
        s
    }

    pub fn constant(n: usize, order: usize, c: Scalar) -> Self {
        TSeries::from_poly(ChartPoly::constant(n, c), order)
    }

    pub fn one(n: usize, order: usize) -> Self {
        TSeries::constant(n, order, Scalar::one())
    }

    /// The series `t` (zero when `order == 0`).
    pub fn t(n: usize, order: usize) -> Self {
        TSeries::one(n, order).shift_up(1)
    }

    /// Builds a series from coefficients, truncating anything beyond `order`.
    pub fn from_coeffs(n: usize, order: usize, cs: Vec<ChartPoly>) -> Self {
        let mut s = TSeries::zero(n, order);
        for (k, c) in cs.into_iter().enumerate() {
            if k <= order {
                assert_eq!(c.n(), n, "chart dimension mismatch");
                s.coeffs[k] = c;
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &ChartPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ChartPoly] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut ChartPoly {
        &mut self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest power of `t` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Same coefficients at a different truncation order.
    pub fn with_order(&self, order: usize) -> TSeries {
        TSeries::from_coeffs(self.n, order, self.coeffs.clone())
    }

    fn check(&self, o: &TSeries) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        assert_eq!(
            self.order(),
            o.order(),
            "truncation order mismatch: {} vs {}",
            self.order(),
            o.order()
        );
    }

    pub fn add_assign_ref(&mut self, o: &TSeries) {
        self.check(o);
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            a.add_assign_ref(b);
        }
    }

    pub fn sub_assign_ref(&mut self, o: &TSeries) {
        self.check(o);
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            a.sub_assign_ref(b);
        }
    }

    pub fn add(&self, o: &TSeries) -> TSeries {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }

    pub fn sub(&self, o: &TSeries) -> TSeries {
        let mut r = self.clone();
        r.sub_assign_ref(o);
        r
    }

    pub fn neg(&self) -> TSeries {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> TSeries {
        TSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, p: &ChartPoly) -> TSeries {
        TSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.mul_ref(p)).collect(),
        }
    }

    pub fn mul(&self, o: &TSeries) -> TSeries {
        self.check(o);
        let nn = self.order();
        let mut out = TSeries::zero(self.n, nn);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(nn + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j].add_assign_ref(&a.mul_ref(b));
            }
        }
        out
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> TSeries {
        let nn = self.order();
        let mut out = TSeries::zero(self.n, nn);
        for i in 0..=nn {
            if i + k <= nn {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Division by `t^k`; the low coefficients must vanish. The top `k`
    /// coefficients of the result are unknown and are returned as zero, so
    /// callers that need them must work at a higher order.
    pub fn shift_down(&self, k: usize) -> TSeries {
        assert!(
            self.coeffs.iter().take(k).all(|c| c.is_zero()),
            "series not divisible by t^{}",
            k
        );
        let nn = self.order();
        let mut out = TSeries::zero(self.n, nn);
        for i in k..=nn {
            out.coeffs[i - k] = self.coeffs[i].clone();
        }
        out
    }

    pub fn partial(&self, idx: usize) -> TSeries {
        TSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.partial(idx)).collect(),
        }
    }

    pub fn partial_multi(&self, alpha: &[u32]) -> TSeries {
        TSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.partial_multi(alpha)).collect(),
        }
    }

    pub fn depends_only_on_x(&self) -> bool {
        self.coeffs.iter().all(|c| c.depends_only_on_x())
    }

    /// Multiplicative inverse modulo `t^{N+1}`; the constant coefficient must
    /// be a nonzero scalar.
    pub fn invert(&self) -> Result<TSeries, AlgebraError> {
        let c0 = &self.coeffs[0];
        if c0.degree() != Some(0) {
            return Err(AlgebraError::NotInvertible);
        }
        let inv0 = c0
            .constant_term()
            .inv()
            .ok_or(AlgebraError::NotInvertible)?;
        let nn = self.order();
        let mut out = TSeries::zero(self.n, nn);
        out.coeffs[0] = ChartPoly::constant(self.n, inv0.clone());
        for k in 1..=nn {
            let mut acc = ChartPoly::zero(self.n);
            for j in 1..=k {
                acc.add_assign_ref(&self.coeffs[j].mul_ref(&out.coeffs[k - j]));
            }
            out.coeffs[k] = acc.scale(&-&inv0);
        }
        Ok(out)
    }

    /// Substitutes `z_i ↦ subs[i]` in every coefficient. All substituted series
    /// must share this series' order.
    pub fn compose(&self, subs: &[TSeries]) -> TSeries {
        assert_eq!(subs.len(), 2 * self.n, "one substitution per coordinate");
        let nn = self.order();
        let target_n = subs[0].n;
        for s in subs {
            assert_eq!(s.order(), nn, "truncation order mismatch in substitution");
            assert_eq!(s.n, target_n, "chart dimension mismatch in substitution");
        }
        let mut powers: Vec<Vec<TSeries>> = subs
            .iter()
            .map(|s| vec![TSeries::one(target_n, nn), s.clone()])
            .collect();
        let mut out = TSeries::zero(target_n, nn);
        for (k, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms() {
                let mut term = TSeries::constant(target_n, nn, v.clone());
                for (i, &p) in e.iter().enumerate() {
                    if p == 0 {
                        continue;
                    }
                    while powers[i].len() <= p as usize {
                        let next = powers[i].last().unwrap().mul(&subs[i]);
                        powers[i].push(next);
                    }
                    term = term.mul(&powers[i][p as usize]);
                }
                out.add_assign_ref(&term.shift_up(k));
            }
        }
        out
    }

    /// Checked arithmetic used at API boundaries.
    pub fn checked_mul(&self, o: &TSeries) -> Result<TSeries, AlgebraError> {
        self.check_compatible(o)?;
        Ok(self.mul(o))
    }

    pub fn checked_add(&self, o: &TSeries) -> Result<TSeries, AlgebraError> {
        self.check_compatible(o)?;
        Ok(self.add(o))
    }

    pub fn check_compatible(&self, o: &TSeries) -> Result<(), AlgebraError> {
        if self.n != o.n {
            return Err(AlgebraError::DimensionMismatch(self.n, o.n));
        }
        if self.order() != o.order() {
            return Err(AlgebraError::OrderMismatch(self.order(), o.order()));
        }
        Ok(())
    }

    /// Canonical text form in the shared literal grammar.
    pub fn to_literal(&self) -> String {
        let mut items = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let tpart = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{}", k),
            };
            for (mono, coef) in super::literal::split_poly_terms(c) {
                let m = match (tpart.is_empty(), mono.is_empty()) {
                    (true, _) => mono,
                    (false, true) => tpart.clone(),
                    (false, false) => format!("{}*{}", tpart, mono),
                };
                items.push((m, coef));
            }
        }
        super::literal::format_terms(items.into_iter())
    }
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Debug for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod t^{})", self.to_literal(), self.order() + 1)
    }
}
