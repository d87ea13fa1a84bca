//! Multidifferential operators with polynomial coefficients, the Hochschild
//! differential, alternation, polarization predicates, coboundary solving and
//! gauge transformations of star-products.

use crate::algebra::poly::{ChartPoly, Mono};
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::engine::StarProduct;
use crate::error::EngineError;
use std::collections::BTreeMap;
use std::fmt;

fn binom(a: u32, b: u32) -> i64 {
    let mut r: i64 = 1;
    for k in 0..b {
        r = r * (a - k) as i64 / (k + 1) as i64;
    }
    r
}

/// `Π_j C(a_j, b_j)`.
fn multi_binom(a: &[u32], b: &[u32]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| binom(x, y)).product()
}

/// Every multi-index `δ <= γ`.
pub fn sub_indices(g: &[u32]) -> Vec<Mono> {
    let mut out = vec![Vec::with_capacity(g.len())];
    for &b in g {
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

/// Ways of writing `γ = δ_0 + … + δ_{p−1}` with multinomial weights.
fn splits(g: &[u32], parts: usize) -> Vec<(i64, Vec<Mono>)> {
    if parts == 1 {
        return vec![(1, vec![g.to_vec()])];
    }
    let mut out = Vec::new();
    for d in sub_indices(g) {
        let rest: Mono = g.iter().zip(&d).map(|(a, b)| a - b).collect();
        let w = multi_binom(g, &d);
        for (w2, mut tail) in splits(&rest, parts - 1) {
            let mut v = vec![d.clone()];
            v.append(&mut tail);
            out.push((w * w2, v));
        }
    }
    out
}

fn add_mono(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_mono(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn is_zero_mono(a: &[u32]) -> bool {
    a.iter().all(|&v| v == 0)
}

/// A `k`-differential operator `Σ c · ∂^{α_1} ⊗ … ⊗ ∂^{α_k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiDiffOp {
    n: usize,
    arity: usize,
    terms: BTreeMap<Vec<Mono>, ChartPoly>,
}

impl MultiDiffOp {
    pub fn zero(n: usize, arity: usize) -> Self {
        MultiDiffOp {
            n,
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// The identity operator.
    pub fn identity(n: usize) -> Self {
        let mut out = MultiDiffOp::zero(n, 1);
        out.add_term(vec![vec![0; 2 * n]], &ChartPoly::one(n));
        out
    }

    /// Pointwise multiplication `(f, g) ↦ fg`.
    pub fn product(n: usize) -> Self {
        let mut out = MultiDiffOp::zero(n, 2);
        out.add_term(vec![vec![0; 2 * n]; 2], &ChartPoly::one(n));
        out
    }

    /// The single term `c · ∂^{α_1} ⊗ … ⊗ ∂^{α_k}`.
    pub fn term(n: usize, idx: Vec<Mono>, c: ChartPoly) -> Self {
        let mut out = MultiDiffOp::zero(n, idx.len());
        out.add_term(idx, &c);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Mono>, &ChartPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: &[Mono]) -> ChartPoly {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| ChartPoly::zero(self.n))
    }

    pub fn add_term(&mut self, idx: Vec<Mono>, c: &ChartPoly) {
        assert_eq!(idx.len(), self.arity, "arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c.clone());
            }
        }
    }

    fn check(&self, o: &MultiDiffOp) {
        assert_eq!(self.n, o.n, "chart dimension mismatch");
        assert_eq!(self.arity, o.arity, "arity mismatch");
    }

    pub fn add(&self, o: &MultiDiffOp) -> MultiDiffOp {
        self.check(o);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &MultiDiffOp) -> MultiDiffOp {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MultiDiffOp {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> MultiDiffOp {
        let mut out = MultiDiffOp::zero(self.n, self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &c.scale(s));
        }
        out
    }

    /// Multiplication of every coefficient by `p`.
    pub fn mul_poly(&self, p: &ChartPoly) -> MultiDiffOp {
        let mut out = MultiDiffOp::zero(self.n, self.arity);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &c.mul_ref(p));
        }
        out
    }

    /// `Σ c · Π ∂^{α_i} f_i`.
    pub fn eval(&self, args: &[ChartPoly]) -> ChartPoly {
        assert_eq!(args.len(), self.arity, "arity mismatch");
        let mut out = ChartPoly::zero(self.n);
        let mut cache: Vec<BTreeMap<Mono, ChartPoly>> = vec![BTreeMap::new(); self.arity];
        'terms: for (idx, c) in &self.terms {
            let mut acc = c.clone();
            for (slot, a) in idx.iter().enumerate() {
                let v = cache[slot]
                    .entry(a.clone())
                    .or_insert_with(|| args[slot].partial_multi(a));
                if v.is_zero() {
                    continue 'terms;
                }
                acc = acc.mul_ref(v);
            }
            out.add_assign_ref(&acc);
        }
        out
    }

    /// Largest total derivative order in `slot`.
    pub fn slot_order(&self, slot: usize) -> u32 {
        self.terms
            .keys()
            .map(|k| k[slot].iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest total derivative order over all slots.
    pub fn max_order(&self) -> u32 {
        (0..self.arity)
            .map(|s| self.slot_order(s))
            .max()
            .unwrap_or(0)
    }

    /// Largest coefficient degree.
    pub fn coeff_degree(&self) -> u32 {
        self.terms
            .values()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Whether every slot of every term carries a derivative.
    pub fn vanishes_on_constants(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.iter().all(|a| !is_zero_mono(a)))
    }

    fn y_free(&self, a: &[u32]) -> bool {
        a[self.n..].iter().all(|&v| v == 0)
    }

    /// No term has every slot free of `y`-derivatives.
    pub fn is_polarized(&self) -> bool {
        self.terms.keys().all(|k| !k.iter().all(|a| self.y_free(a)))
    }

    /// No term has slots `1..k−1` all free of `y`-derivatives.
    pub fn is_strongly_polarized(&self) -> bool {
        if self.arity == 0 {
            return self.is_zero();
        }
        self.terms
            .keys()
            .all(|k| !k[..self.arity - 1].iter().all(|a| self.y_free(a)))
    }

    /// Hochschild differential.
    pub fn hochschild_d(&self) -> MultiDiffOp {
        let k = self.arity;
        let n = self.n;
        let zero = vec![0; 2 * n];
        let mut out = MultiDiffOp::zero(n, k + 1);
        for (idx, c) in &self.terms {
            let mut first = vec![zero.clone()];
            first.extend(idx.iter().cloned());
            out.add_term(first, c);
            for i in 1..=k {
                let a = &idx[i - 1];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                for d in sub_indices(a) {
                    let mut v: Vec<Mono> = idx[..i - 1].to_vec();
                    v.push(d.clone());
                    v.push(sub_mono(a, &d));
                    v.extend(idx[i..].iter().cloned());
                    let w = sign * multi_binom(a, &d);
                    out.add_term(v, &c.scale(&Scalar::from_int(w)));
                }
            }
            let mut last = idx.clone();
            last.push(zero.clone());
            let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
            out.add_term(last, &c.scale(&Scalar::from_int(sign)));
        }
        out
    }

    /// Signed average over argument permutations.
    pub fn alternate(&self) -> MultiDiffOp {
        let k = self.arity;
        let perms = permutations(k);
        let mut fact: i64 = 1;
        for j in 2..=k as i64 {
            fact *= j;
        }
        let inv = Scalar::frac(1, fact);
        let mut out = MultiDiffOp::zero(self.n, k);
        for (idx, c) in &self.terms {
            for (p, sign) in &perms {
                let mut v = vec![Vec::new(); k];
                for i in 0..k {
                    v[p[i]] = idx[i].clone();
                }
                out.add_term(v, &c.scale(&(&inv * &Scalar::from_int(*sign))));
            }
        }
        out
    }

    /// `E ∘ ν` for a unary `E = self`: `E(ν(f_1, …, f_k))`.
    pub fn compose_after(&self, nu: &MultiDiffOp) -> MultiDiffOp {
        assert_eq!(self.arity, 1, "outer operator must be unary");
        assert_eq!(self.n, nu.n, "chart dimension mismatch");
        let k = nu.arity;
        let mut out = MultiDiffOp::zero(self.n, k);
        for (eidx, e) in &self.terms {
            let g = &eidx[0];
            let parts = splits(g, k + 1);
            for (idx, c) in &nu.terms {
                for (w, sp) in &parts {
                    let dc = c.partial_multi(&sp[0]);
                    if dc.is_zero() {
                        continue;
                    }
                    let v: Vec<Mono> = (0..k).map(|i| add_mono(&idx[i], &sp[i + 1])).collect();
                    out.add_term(v, &e.mul_ref(&dc).scale(&Scalar::from_int(*w)));
                }
            }
        }
        out
    }

    /// `ν(D_1 f_1, …, D_k f_k)` for unary `D_i`.
    pub fn compose_before(&self, ds: &[&MultiDiffOp]) -> MultiDiffOp {
        assert_eq!(ds.len(), self.arity, "one operator per slot");
        let n = self.n;
        let mut out = MultiDiffOp::zero(n, self.arity);
        for (idx, c) in &self.terms {
            // partial results: (coefficient, indices so far)
            let mut acc: Vec<(ChartPoly, Vec<Mono>)> = vec![(c.clone(), Vec::new())];
            for (slot, a) in idx.iter().enumerate() {
                let mut next = Vec::new();
                for (didx, dc) in &ds[slot].terms {
                    let b = &didx[0];
                    for d in sub_indices(a) {
                        let der = dc.partial_multi(&d);
                        if der.is_zero() {
                            continue;
                        }
                        let w = Scalar::from_int(multi_binom(a, &d));
                        let m = add_mono(&sub_mono(a, &d), b);
                        for (pc, pv) in &acc {
                            let mut v = pv.clone();
                            v.push(m.clone());
                            next.push((pc.mul_ref(&der).scale(&w), v));
                        }
                    }
                }
                acc = next;
            }
            for (pc, v) in acc {
                out.add_term(v, &pc);
            }
        }
        out
    }

    /// Operator composition `self ∘ other` of unary operators.
    pub fn compose(&self, other: &MultiDiffOp) -> MultiDiffOp {
        self.compose_after(other)
    }

    /// Canonical text such as `(1/2)*D[y1]|D[x1]`.
    pub fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(idx, c)| {
                let slots: Vec<String> = idx.iter().map(|a| deriv_name(self.n, a)).collect();
                format!("({})*{}", c.to_literal(), slots.join("|"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `D[x1^2,y1]`, or `1` for the empty multi-index.
pub fn deriv_name(n: usize, a: &[u32]) -> String {
    if is_zero_mono(a) {
        return "1".into();
    }
    let parts: Vec<String> = a
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let nm = crate::algebra::poly::coord_name(n, i);
            if e == 1 {
                nm
            } else {
                format!("{}^{}", nm, e)
            }
        })
        .collect();
    format!("D[{}]", parts.join(","))
}

impl fmt::Debug for MultiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            // moving k−1 from the end to `pos` costs (len − pos) transpositions
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// A formal series `Σ t^k A_k` of `k`-ary operators, truncated at `t^N`.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffSeries {
    n: usize,
    order: usize,
    arity: usize,
    parts: Vec<MultiDiffOp>,
}

/// Gauge operators `D = 1 + t D_1 + …`.
pub type GaugeOperator = DiffSeries;

impl DiffSeries {
    pub fn zero(n: usize, order: usize, arity: usize) -> Self {
        DiffSeries {
            n,
            order,
            arity,
            parts: vec![MultiDiffOp::zero(n, arity); order + 1],
        }
    }

    pub fn from_parts(n: usize, order: usize, arity: usize, parts: Vec<MultiDiffOp>) -> Self {
        let mut out = DiffSeries::zero(n, order, arity);
        for (k, p) in parts.into_iter().enumerate() {
            if k <= order {
                assert_eq!(p.arity, arity, "arity mismatch");
                out.parts[k] = p;
            }
        }
        out
    }

    /// The unary identity `1`.
    pub fn identity(n: usize, order: usize) -> Self {
        let mut out = DiffSeries::zero(n, order, 1);
        out.parts[0] = MultiDiffOp::identity(n);
        out
    }

    /// `1 + t^k E`.
    pub fn one_plus(n: usize, order: usize, k: usize, e: MultiDiffOp) -> Self {
        let mut out = DiffSeries::identity(n, order);
        if k <= order {
            out.parts[k] = out.parts[k].add(&e);
        }
        out
    }

    /// `exp(s · Σ_i ∂_{x_i} ∂_{y_i})` with `s` carrying one power of `t`.
    pub fn exp_laplacian(n: usize, order: usize, s: &Scalar) -> Self {
        let mut lap = MultiDiffOp::zero(n, 1);
        for i in 0..n {
            let mut a = vec![0; 2 * n];
            a[i] = 1;
            a[n + i] = 1;
            lap.add_term(vec![a], &ChartPoly::one(n));
        }
        let mut out = DiffSeries::identity(n, order);
        let mut pow = MultiDiffOp::identity(n);
        for k in 1..=order {
            pow = lap.compose(&pow);
            let c = &s.pow(k as u32) * &Scalar::inv_factorial(k as u32);
            out.parts[k] = pow.scale(&c);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn parts(&self) -> &[MultiDiffOp] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &MultiDiffOp {
        &self.parts[k]
    }

    pub fn part_mut(&mut self, k: usize) -> &mut MultiDiffOp {
        &mut self.parts[k]
    }

    pub fn add(&self, o: &DiffSeries) -> DiffSeries {
        assert_eq!(self.order, o.order, "truncation order mismatch");
        DiffSeries {
            n: self.n,
            order: self.order,
            arity: self.arity,
            parts: self
                .parts
                .iter()
                .zip(&o.parts)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &DiffSeries) -> DiffSeries {
        assert_eq!(self.order, o.order, "truncation order mismatch");
        DiffSeries {
            n: self.n,
            order: self.order,
            arity: self.arity,
            parts: self
                .parts
                .iter()
                .zip(&o.parts)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    /// Whether this unary series is `1` plus terms of positive order.
    pub fn has_unit_constant_term(&self) -> bool {
        self.arity == 1 && self.parts[0] == MultiDiffOp::identity(self.n)
    }

    /// Whether `D f = f` for every `f` depending on `x` only.
    pub fn identical_on_o(&self) -> bool {
        self.has_unit_constant_term() && self.parts[1..].iter().all(|p| p.is_polarized())
    }

    /// `Σ t^{k+j_1+…} A_k(f_{1,j_1}, …)`.
    pub fn eval(&self, args: &[TSeries]) -> TSeries {
        assert_eq!(args.len(), self.arity, "arity mismatch");
        let order = self.order;
        let mut out = TSeries::zero(self.n, order);
        let mut combos: Vec<(usize, Vec<&ChartPoly>)> = vec![(0, Vec::new())];
        for a in args {
            assert_eq!(a.order(), order, "truncation order mismatch");
            let mut next = Vec::new();
            for (deg, v) in &combos {
                for (j, c) in a.coeffs().iter().enumerate() {
                    if deg + j > order || c.is_zero() {
                        continue;
                    }
                    let mut w = v.clone();
                    w.push(c);
                    next.push((deg + j, w));
                }
            }
            combos = next;
        }
        for (deg, v) in combos {
            let owned: Vec<ChartPoly> = v.into_iter().cloned().collect();
            for k in 0..=order - deg {
                if self.parts[k].is_zero() {
                    continue;
                }
                let val = self.parts[k].eval(&owned);
                out.coeff_mut(k + deg).add_assign_ref(&val);
            }
        }
        out
    }

    /// `self ∘ other` for a unary `self`.
    pub fn compose_after(&self, other: &DiffSeries) -> DiffSeries {
        assert_eq!(self.order, other.order, "truncation order mismatch");
        let mut out = DiffSeries::zero(self.n, self.order, other.arity);
        for (i, e) in self.parts.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            for (j, nu) in other.parts.iter().enumerate().take(self.order + 1 - i) {
                if nu.is_zero() {
                    continue;
                }
                out.parts[i + j] = out.parts[i + j].add(&e.compose_after(nu));
            }
        }
        out
    }

    /// `self(D f_1, …, D f_k)` for a single unary series `D`.
    pub fn compose_before_all(&self, d: &DiffSeries) -> DiffSeries {
        assert_eq!(d.arity, 1, "gauge must be unary");
        assert_eq!(self.order, d.order, "truncation order mismatch");
        let order = self.order;
        let k = self.arity;
        let mut out = DiffSeries::zero(self.n, order, k);
        // all assignments of powers (j_1..j_k) to the slots
        let mut assigns: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        for _ in 0..k {
            let mut next = Vec::new();
            for (s, v) in &assigns {
                for j in 0..=order - s {
                    if d.parts[j].is_zero() {
                        continue;
                    }
                    let mut w = v.clone();
                    w.push(j);
                    next.push((s + j, w));
                }
            }
            assigns = next;
        }
        for (i, nu) in self.parts.iter().enumerate() {
            if nu.is_zero() {
                continue;
            }
            for (s, v) in &assigns {
                if i + s > order {
                    continue;
                }
                let ds: Vec<&MultiDiffOp> = v.iter().map(|&j| &d.parts[j]).collect();
                out.parts[i + s] = out.parts[i + s].add(&nu.compose_before(&ds));
            }
        }
        out
    }

    /// Inverse of a unary series with unit constant term.
    pub fn inverse(&self) -> Result<DiffSeries, EngineError> {
        if !self.has_unit_constant_term() {
            return Err(EngineError::Precondition(
                "gauge operator must have constant term 1".into(),
            ));
        }
        let mut nil = self.clone();
        nil.parts[0] = MultiDiffOp::zero(self.n, 1);
        let neg = DiffSeries {
            n: self.n,
            order: self.order,
            arity: 1,
            parts: nil.parts.iter().map(|p| p.neg()).collect(),
        };
        let mut out = DiffSeries::identity(self.n, self.order);
        let mut pow = DiffSeries::identity(self.n, self.order);
        for _ in 0..self.order {
            pow = neg.compose_after(&pow);
            out = out.add(&pow);
        }
        Ok(out)
    }

    pub fn with_order(&self, order: usize) -> DiffSeries {
        let mut parts = self.parts.clone();
        parts.resize(order + 1, MultiDiffOp::zero(self.n, self.arity));
        DiffSeries::from_parts(self.n, order, self.arity, parts)
    }

    pub fn to_literal(&self) -> String {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, p)| format!("t^{}: {}", k, p.to_literal()))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for DiffSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

/// The product `(f, g) ↦ D⁻¹ μ(Df, Dg)`: `D` is an algebra map from the
/// result to `μ`. Composition: gauging by `D_1` and then by `D_2` equals
/// gauging once by `D_1 ∘ D_2`.
pub fn apply_gauge(d: &GaugeOperator, mu: &StarProduct) -> Result<StarProduct, EngineError> {
    if d.order() != mu.order() {
        return Err(EngineError::Algebra(
            crate::error::AlgebraError::OrderMismatch(d.order(), mu.order()),
        ));
    }
    let inv = d.inverse()?;
    let table = inv.compose_after(&mu.table().compose_before_all(d));
    Ok(StarProduct::from_table(
        table,
        format!("gauged {}", mu.method()),
    ))
}

/// Which property a coboundary correction must establish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoboundaryConstraint {
    /// `ν + db` strongly polarized.
    MakeStronglyPolarized,
    /// `ν + db` antisymmetric (`= Alt ν`).
    KillCommutativePart,
}

/// Solves `db = target` for a unary `b` without zero-order part. The
/// differential of `κ ∂^γ` is `−κ Σ_{0<δ<γ} C(γ,δ) ∂^δ ⊗ ∂^{γ−δ}`, so the
/// system decouples by `(γ, κ)`; free derivation terms are set to zero.
fn solve_d_equals(target: &MultiDiffOp, polarized_only: bool) -> Result<MultiDiffOp, EngineError> {
    let n = target.n;
    let mut b = MultiDiffOp::zero(n, 1);
    let mut seen: BTreeMap<Mono, ()> = BTreeMap::new();
    for (idx, c) in &target.terms {
        let g = add_mono(&idx[0], &idx[1]);
        if is_zero_mono(&idx[0]) || is_zero_mono(&idx[1]) {
            return Err(EngineError::Infeasible(format!(
                "term {} has an underived slot",
                MultiDiffOp::term(n, idx.clone(), c.clone()).to_literal()
            )));
        }
        if seen.contains_key(&g) {
            continue;
        }
        seen.insert(g.clone(), ());
        let w = -multi_binom(&g, &idx[0]);
        b.add_term(vec![g], &c.scale(&Scalar::frac(1, w)));
    }
    if polarized_only && !b.is_polarized() {
        return Err(EngineError::Infeasible(
            "the correction is not polarized".into(),
        ));
    }
    if b.hochschild_d() != *target {
        return Err(EngineError::Infeasible(
            "target is not a coboundary of a differential operator".into(),
        ));
    }
    Ok(b)
}

/// Returns `b` with `ν + db` satisfying the constraint.
pub fn solve_coboundary(
    nu: &MultiDiffOp,
    constraint: CoboundaryConstraint,
    polarized_only: bool,
) -> Result<MultiDiffOp, EngineError> {
    assert_eq!(nu.arity, 2, "2-cochain expected");
    let n = nu.n;
    match constraint {
        CoboundaryConstraint::MakeStronglyPolarized => {
            if nu.is_strongly_polarized() {
                return Ok(MultiDiffOp::zero(n, 1));
            }
            let mut b = MultiDiffOp::zero(n, 1);
            for (idx, c) in &nu.terms {
                let (a, cc) = (&idx[0], &idx[1]);
                let a_pure_x = !is_zero_mono(a) && nu.y_free(a);
                let c_pure_y = !is_zero_mono(cc) && cc[..n].iter().all(|&v| v == 0);
                if a_pure_x && c_pure_y {
                    b.add_term(vec![add_mono(a, cc)], c);
                }
            }
            if !nu.add(&b.hochschild_d()).is_strongly_polarized() {
                return Err(EngineError::Infeasible(
                    "cochain is not polarized with strongly polarized differential".into(),
                ));
            }
            Ok(b)
        }
        CoboundaryConstraint::KillCommutativePart => {
            let target = nu.alternate().sub(nu);
            solve_d_equals(&target, polarized_only)
        }
    }
}

/// Result of an order-by-order equivalence search.
#[derive(Clone, Debug)]
pub enum Equivalence {
    Found(GaugeOperator),
    /// The residual 2-cocycle at `order` has a nonzero antisymmetric part.
    Obstruction {
        order: usize,
        cocycle: MultiDiffOp,
    },
}

/// Searches `D` with `apply_gauge(D, μ) = μ̃`.
pub fn equivalence_search(
    mu: &StarProduct,
    mu_t: &StarProduct,
    identical_on_o: bool,
) -> Result<Equivalence, EngineError> {
    let order = mu.order();
    if mu_t.order() != order {
        return Err(EngineError::Algebra(
            crate::error::AlgebraError::OrderMismatch(order, mu_t.order()),
        ));
    }
    let n = mu.n();
    if mu.table().part(0) != mu_t.table().part(0) {
        return Err(EngineError::Precondition("order-0 parts differ".into()));
    }
    let mut d = DiffSeries::identity(n, order);
    for k in 1..=order {
        let cur = apply_gauge(&d, mu)?;
        let nu = mu_t.table().part(k).sub(cur.table().part(k));
        if nu.is_zero() {
            continue;
        }
        if !nu.hochschild_d().is_zero() {
            return Err(EngineError::Precondition(format!(
                "residual at order {} is not a cocycle",
                k
            )));
        }
        let alt = nu.alternate();
        if !alt.is_zero() {
            return Ok(Equivalence::Obstruction {
                order: k,
                cocycle: nu,
            });
        }
        let b = solve_coboundary(
            &nu,
            CoboundaryConstraint::KillCommutativePart,
            identical_on_o,
        )?;
        d = d.compose_after(&DiffSeries::one_plus(n, order, k, b.neg()));
    }
    let check = apply_gauge(&d, mu)?;
    if check.table() != mu_t.table() {
        return Err(EngineError::NonConvergence(
            "gauged product does not match the target".into(),
        ));
    }
    Ok(Equivalence::Found(d))
}

/// Gauges a wPSP to a PSP by an operator identical on `O`.
pub fn normalize_wpsp(mu: &StarProduct) -> Result<(GaugeOperator, StarProduct), EngineError> {
    let order = mu.order();
    let n = mu.n();
    let mut d = DiffSeries::identity(n, order);
    for k in 1..=order {
        let cur = apply_gauge(&d, mu)?;
        let nu = cur.table().part(k);
        if nu.is_strongly_polarized() {
            continue;
        }
        let b = solve_coboundary(nu, CoboundaryConstraint::MakeStronglyPolarized, true)?;
        d = d.compose_after(&DiffSeries::one_plus(n, order, k, b));
    }
    let out = apply_gauge(&d, mu)?;
    Ok((d, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(v: &[u32]) -> Mono {
        v.to_vec()
    }

    fn op(n: usize, idx: &[&[u32]], c: i64) -> MultiDiffOp {
        MultiDiffOp::term(
            n,
            idx.iter().map(|a| mono(a)).collect(),
            ChartPoly::constant(n, Scalar::from_int(c)),
        )
    }

    fn x() -> ChartPoly {
        ChartPoly::x(1, 0)
    }

    fn y() -> ChartPoly {
        ChartPoly::y(1, 0)
    }

    #[test]
    fn multiplication_operator_boundary() {
        let c = ChartPoly::x(1, 0).add_const();
        let nu = MultiDiffOp::term(1, vec![mono(&[0, 0])], c.clone());
        let dnu = nu.hochschild_d();
        let (f, g) = (x(), y());
        let direct =
            &(&f.mul_ref(&c).mul_ref(&g) - &c.mul_ref(&f).mul_ref(&g)) + &c.mul_ref(&f).mul_ref(&g);
        assert_eq!(dnu.eval(&[f, g]), direct);
    }

    #[test]
    fn d_squared_vanishes() {
        let nu = op(1, &[&[1, 1], &[0, 2]], 3).add(&op(1, &[&[2, 0]], 1).hochschild_d());
        assert!(nu.hochschild_d().hochschild_d().is_zero());
        let e = MultiDiffOp::term(1, vec![mono(&[1, 1])], x().mul_ref(&y()));
        assert!(e.hochschild_d().hochschild_d().is_zero());
    }

    #[test]
    fn d_with_constant_last_slot() {
        let nu = op(1, &[&[0, 1], &[1, 0]], 1);
        let one = ChartPoly::one(1);
        assert!(nu.hochschild_d().eval(&[x(), y(), one]).is_zero());
    }

    #[test]
    fn alternation_examples() {
        let nu = op(1, &[&[0, 1], &[1, 0]], 1);
        let expect = nu
            .sub(&op(1, &[&[1, 0], &[0, 1]], 1))
            .scale(&Scalar::frac(1, 2));
        assert_eq!(nu.alternate(), expect);
        let sym = op(1, &[&[1, 0], &[1, 0]], 1);
        assert!(sym.alternate().is_zero());
    }

    #[test]
    fn polarization_predicates() {
        let a = op(1, &[&[0, 1], &[1, 0]], 1);
        assert!(a.is_polarized() && a.is_strongly_polarized());
        let b = op(1, &[&[1, 0], &[0, 1]], 1);
        assert!(b.is_polarized() && !b.is_strongly_polarized());
        let c = op(1, &[&[1, 0], &[1, 0]], 1);
        assert!(!c.is_polarized() && !c.is_strongly_polarized());
    }

    #[test]
    fn symmetric_cocycle_coboundary() {
        let nu = op(1, &[&[1, 0], &[1, 0]], 1);
        let b = solve_coboundary(&nu, CoboundaryConstraint::KillCommutativePart, false).unwrap();
        assert_eq!(
            b,
            MultiDiffOp::term(
                1,
                vec![mono(&[2, 0])],
                ChartPoly::constant(1, Scalar::frac(1, 2))
            )
        );
        assert_eq!(b.hochschild_d(), nu.alternate().sub(&nu));
    }

    #[test]
    fn propdop_single_term() {
        let nu = op(1, &[&[1, 0], &[0, 1]], 1);
        let b = solve_coboundary(&nu, CoboundaryConstraint::MakeStronglyPolarized, true).unwrap();
        assert_eq!(b, op(1, &[&[1, 1]], 1));
        assert!(nu.add(&b.hochschild_d()).is_strongly_polarized());
    }

    #[test]
    fn unary_composition() {
        let dx = op(1, &[&[1, 0]], 1);
        let xm = MultiDiffOp::term(1, vec![mono(&[0, 0])], x());
        // ∂_x ∘ x = x ∂_x + 1
        let expect = MultiDiffOp::term(1, vec![mono(&[1, 0])], x()).add(&MultiDiffOp::identity(1));
        assert_eq!(dx.compose(&xm), expect);
        let f = x().pow(3).mul_ref(&y());
        assert_eq!(dx.compose(&xm).eval(&[f.clone()]), xm.eval(&[f]).partial(0));
    }

    #[test]
    fn precomposition_matches_evaluation() {
        let nu = op(1, &[&[0, 1], &[1, 0]], 1);
        let d = MultiDiffOp::term(1, vec![mono(&[1, 1])], x().mul_ref(&y()));
        let comp = nu.compose_before(&[&d, &d]);
        let f = x().pow(2).mul_ref(&y().pow(2));
        let g = x().pow(3).mul_ref(&y());
        let direct = nu.eval(&[d.eval(&[f.clone()]), d.eval(&[g.clone()])]);
        assert_eq!(comp.eval(&[f, g]), direct);
    }

    #[test]
    fn weyl_to_wick_gauge_direction() {
        let d = DiffSeries::exp_laplacian(1, 3, &Scalar::frac(-1, 2));
        let wick = StarProduct::moyal_wick(1, 3);
        let weyl = StarProduct::moyal_weyl(1, 3);
        assert_eq!(apply_gauge(&d, &weyl).unwrap().table(), wick.table());
        let id = DiffSeries::identity(1, 3);
        assert_eq!(apply_gauge(&id, &weyl).unwrap().table(), weyl.table());
    }

    #[test]
    fn gauges_compose_contravariantly() {
        let order = 3;
        let d1 = DiffSeries::one_plus(1, order, 1, MultiDiffOp::term(1, vec![mono(&[1, 1])], x()));
        let d2 = DiffSeries::one_plus(1, order, 2, MultiDiffOp::term(1, vec![mono(&[0, 2])], y()));
        let mu = StarProduct::moyal_wick(1, order);
        let two_step = apply_gauge(&d2, &apply_gauge(&d1, &mu).unwrap()).unwrap();
        let once = apply_gauge(&d1.compose_after(&d2), &mu).unwrap();
        assert_eq!(two_step.table(), once.table());
    }

    #[test]
    fn weyl_wick_equivalence() {
        let wick = StarProduct::moyal_wick(2, 3);
        let weyl = StarProduct::moyal_weyl(2, 3);
        let d = match equivalence_search(&weyl, &wick, true).unwrap() {
            Equivalence::Found(d) => d,
            other => panic!("{:?}", other),
        };
        let mut d1 = MultiDiffOp::zero(2, 1);
        for i in 0..2 {
            let mut a = vec![0; 4];
            a[i] = 1;
            a[2 + i] = 1;
            d1.add_term(vec![a], &ChartPoly::constant(2, Scalar::frac(-1, 2)));
        }
        assert_eq!(d.part(1), &d1);
        assert!(d.identical_on_o());
    }

    #[test]
    fn bracket_mismatch_is_an_obstruction() {
        let wick = StarProduct::moyal_wick(1, 2);
        let mut t = wick.table().clone();
        let extra = MultiDiffOp::term(1, vec![mono(&[0, 1]), mono(&[1, 0])], x());
        *t.part_mut(1) = t.part(1).add(&extra).sub(&op(1, &[&[1, 0], &[0, 1]], 0));
        let other = StarProduct::from_table(t, "other");
        match equivalence_search(&wick, &other, false) {
            Ok(Equivalence::Obstruction { order, .. }) => assert_eq!(order, 1),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn wpsp_normalization() {
        let order = 3;
        let e = MultiDiffOp::term(1, vec![mono(&[1, 1])], ChartPoly::one(1));
        let d = DiffSeries::one_plus(1, order, 2, e);
        let wpsp = apply_gauge(&d, &StarProduct::moyal_wick(1, order)).unwrap();
        assert!(!wpsp.part(2).is_strongly_polarized());
        let (g, out) = normalize_wpsp(&wpsp).unwrap();
        assert!(g.identical_on_o());
        for k in 0..=order {
            assert!(k == 0 || out.part(k).is_strongly_polarized());
        }
    }

    trait AddConst {
        fn add_const(&self) -> ChartPoly;
    }

    impl AddConst for ChartPoly {
        fn add_const(&self) -> ChartPoly {
            self + &ChartPoly::one(self.n())
        }
    }
}
