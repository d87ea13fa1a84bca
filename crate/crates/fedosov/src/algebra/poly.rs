//! Multivariate polynomials over ℚ(i) in the chart coordinates
//! `(x_1..x_n, y_1..y_n)`.

use super::scalar::Scalar;
use crate::error::AlgebraError;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of length `2n`: x-block first, then the y-block.
pub type Mono = Vec<u32>;

/// Name of coordinate `idx` on a chart of half-dimension `n`.
pub fn coord_name(n: usize, idx: usize) -> String {
    if idx < n {
        format!("x{}", idx + 1)
    } else {
        format!("y{}", idx - n + 1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartPoly {
    n: usize,
    terms: BTreeMap<Mono, Scalar>,
}

impl ChartPoly {
    pub fn zero(n: usize) -> Self {
        ChartPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = ChartPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; 2 * n], c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        ChartPoly::constant(n, Scalar::one())
    }

    /// The coordinate function with index `idx` (x-block first).
    pub fn var(n: usize, idx: usize) -> Self {
        assert!(idx < 2 * n, "coordinate index out of range");
        let mut e = vec![0; 2 * n];
        e[idx] = 1;
        ChartPoly::monomial(n, e, Scalar::one())
    }

    pub fn x(n: usize, i: usize) -> Self {
        ChartPoly::var(n, i)
    }

    pub fn y(n: usize, i: usize) -> Self {
        ChartPoly::var(n, n + i)
    }

    pub fn monomial(n: usize, exps: Mono, c: Scalar) -> Self {
        assert_eq!(exps.len(), 2 * n, "exponent vector length");
        let mut p = ChartPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Constant coefficient.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; 2 * self.n])
    }

    /// Adds `c·z^exps` in place.
    pub fn add_term(&mut self, exps: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &ChartPoly) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, o: &ChartPoly) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        for (e, c) in &o.terms {
            self.add_term(e.clone(), &-c);
        }
    }

    /// `self += c · o`.
    pub fn add_scaled(&mut self, o: &ChartPoly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        for (e, v) in &o.terms {
            self.add_term(e.clone(), &(v * c));
        }
    }

    pub fn scale(&self, c: &Scalar) -> ChartPoly {
        if c.is_zero() {
            return ChartPoly::zero(self.n);
        }
        ChartPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul_ref(&self, o: &ChartPoly) -> ChartPoly {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        let mut out = ChartPoly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Mono = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> ChartPoly {
        let mut acc = ChartPoly::one(self.n);
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// `∂/∂z_idx`.
    pub fn partial(&self, idx: usize) -> ChartPoly {
        let mut out = ChartPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[idx] > 0 {
                let mut f = e.clone();
                f[idx] -= 1;
                out.add_term(f, &(c * &Scalar::from_int(e[idx] as i64)));
            }
        }
        out
    }

    /// `∂^α` for a multi-index over all `2n` directions.
    pub fn partial_multi(&self, alpha: &[u32]) -> ChartPoly {
        let mut out = ChartPoly::zero(self.n);
        'terms: for (e, c) in &self.terms {
            let mut f = e.clone();
            let mut k = c.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if e[i] < a {
                    continue 'terms;
                }
                for j in 0..a {
                    k = &k * &Scalar::from_int((e[i] - j) as i64);
                }
                f[i] -= a;
            }
            out.add_term(f, &k);
        }
        out
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// True when no monomial contains a y-coordinate.
    pub fn depends_only_on_x(&self) -> bool {
        self.terms
            .keys()
            .all(|e| e[self.n..].iter().all(|&v| v == 0))
    }

    /// Homogeneous components keyed by total degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, ChartPoly> {
        let mut out: BTreeMap<u32, ChartPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d: u32 = e.iter().sum();
            out.entry(d)
                .or_insert_with(|| ChartPoly::zero(self.n))
                .add_term(e.clone(), c);
        }
        out
    }

    /// Restriction to `y = 0`.
    pub fn at_y_zero(&self) -> ChartPoly {
        let mut out = ChartPoly::zero(self.n);
        for (e, c) in &self.terms {
            if e[self.n..].iter().all(|&v| v == 0) {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> ChartPoly {
        let mut out = ChartPoly::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    /// Checked arithmetic used at API boundaries.
    pub fn checked_add(&self, o: &ChartPoly) -> Result<ChartPoly, AlgebraError> {
        self.check_dim(o)?;
        Ok(self + o)
    }

    pub fn checked_mul(&self, o: &ChartPoly) -> Result<ChartPoly, AlgebraError> {
        self.check_dim(o)?;
        Ok(self.mul_ref(o))
    }

    fn check_dim(&self, o: &ChartPoly) -> Result<(), AlgebraError> {
        if self.n != o.n {
            return Err(AlgebraError::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    fn fmt_mono(&self, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = coord_name(self.n, i);
            if k == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{}^{}", name, k));
            }
        }
        parts.join("*")
    }

    /// Canonical text form, shared by the literal grammar.
    pub fn to_literal(&self) -> String {
        crate::algebra::literal::format_terms(
            self.terms
                .iter()
                .rev()
                .map(|(e, c)| (self.fmt_mono(e), c.clone())),
        )
    }
}

impl fmt::Display for ChartPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Debug for ChartPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl<'a> Add<&'a ChartPoly> for &'a ChartPoly {
    type Output = ChartPoly;
    fn add(self, o: &ChartPoly) -> ChartPoly {
        let mut r = self.clone();
        r.add_assign_ref(o);
        r
    }
}

impl<'a> Sub<&'a ChartPoly> for &'a ChartPoly {
    type Output = ChartPoly;
    fn sub(self, o: &ChartPoly) -> ChartPoly {
        let mut r = self.clone();
        r.sub_assign_ref(o);
        r
    }
}

impl<'a> Mul<&'a ChartPoly> for &'a ChartPoly {
    type Output = ChartPoly;
    fn mul(self, o: &ChartPoly) -> ChartPoly {
        self.mul_ref(o)
    }
}

impl Neg for &ChartPoly {
    type Output = ChartPoly;
    fn neg(self) -> ChartPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

/// Every exponent vector of total degree `<= d` in `m` variables, in graded order.
pub fn monomials_up_to(m: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut cur = vec![0u32; m];
        fill(&mut out, &mut cur, 0, deg);
    }
    out
}

fn fill(out: &mut Vec<Mono>, cur: &mut Mono, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        fill(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}
