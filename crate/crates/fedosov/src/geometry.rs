//! Connections on the chart, their lift to the Fedosov algebra, and
//! curvature.
//!
//! Index convention: directions `0..n` are `x_1..x_n`, directions `n..2n` are
//! `y_1..y_n`. The polarization is `P = span{∂/∂y_i}`. `Γ^k_{ij}` is the
//! component along `∂_k` of `∇_{∂_i} ∂_j`.

use crate::algebra::form::BaseForm;
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::error::EngineError;
use crate::fiber::{FKey, FiberElement, Ordering};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChristoffelData {
    n: usize,
    order: usize,
    /// `(i, j, k) ↦ Γ^k_{ij}`; absent entries are zero.
    entries: BTreeMap<(usize, usize, usize), TSeries>,
}

/// Outcome of one validity condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub passed: bool,
    /// First failing identity, when any.
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn pass() -> Self {
        CheckOutcome {
            passed: true,
            witness: None,
        }
    }

    pub fn fail(w: String) -> Self {
        CheckOutcome {
            passed: false,
            witness: Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    /// Torsion-free and `∇ω = 0`.
    pub symplectic: CheckOutcome,
    /// `∇P ⊆ P`.
    pub preserves_p: CheckOutcome,
    /// `R(P, P)P = 0`.
    pub flat_on_p: CheckOutcome,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.symplectic.passed && self.preserves_p.passed && self.flat_on_p.passed
    }
}

impl ChristoffelData {
    /// The standard flat connection: every symbol vanishes.
    pub fn flat(n: usize, order: usize) -> Self {
        ChristoffelData {
            n,
            order,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &TSeries)> {
        self.entries.iter()
    }

    pub fn is_flat(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same symbols at another truncation order.
    pub fn with_order(&self, order: usize) -> ChristoffelData {
        let mut out = ChristoffelData::flat(self.n, order);
        for (k, v) in &self.entries {
            let v = v.with_order(order);
            if !v.is_zero() {
                out.entries.insert(*k, v);
            }
        }
        out
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> TSeries {
        self.entries
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(|| TSeries::zero(self.n, self.order))
    }

    /// Sets `Γ^k_{ij}` only.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: TSeries) {
        assert!(
            i < 2 * self.n && j < 2 * self.n && k < 2 * self.n,
            "index out of range"
        );
        if v.is_zero() {
            self.entries.remove(&(i, j, k));
        } else {
            self.entries.insert((i, j, k), v);
        }
    }

    /// Sets `Γ^k_{ij}` and `Γ^k_{ji}`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, v: TSeries) {
        self.set(i, j, k, v.clone());
        self.set(j, i, k, v);
    }

    /// Builds the connection whose lowered symbols `Γ_{ijk} = ω_{kl} Γ^l_{ij}`
    /// (standard `ω`) are the full symmetrization of the given entries. Such a
    /// connection is torsion-free and symplectic; it preserves `P` exactly when
    /// no lowered symbol carries two or more `y` indices.
    pub fn from_lowered(
        n: usize,
        order: usize,
        lowered: &[(usize, usize, usize, TSeries)],
    ) -> Self {
        let mut low: BTreeMap<[usize; 3], TSeries> = BTreeMap::new();
        for (i, j, k, v) in lowered {
            let mut idx = [*i, *j, *k];
            idx.sort();
            low.insert(idx, v.clone());
        }
        let mut out = ChristoffelData::flat(n, order);
        for (idx, v) in &low {
            let perms = [
                [idx[0], idx[1], idx[2]],
                [idx[0], idx[2], idx[1]],
                [idx[1], idx[0], idx[2]],
                [idx[1], idx[2], idx[0]],
                [idx[2], idx[0], idx[1]],
                [idx[2], idx[1], idx[0]],
            ];
            for p in perms {
                let (i, j, k) = (p[0], p[1], p[2]);
                // Γ^{x_a}_{ij} = Γ_{ij y_a} and Γ^{y_a}_{ij} = −Γ_{ij x_a}.
                let (l, val) = if k >= n {
                    (k - n, v.clone())
                } else {
                    (k + n, v.neg())
                };
                out.set(i, j, l, val);
            }
        }
        out
    }

    /// Classical curvature `R^a_{cbd}`: the `∂_a` component of
    /// `R(∂_b, ∂_d)∂_c`.
    pub fn riemann(&self, a: usize, c: usize, b: usize, d: usize) -> TSeries {
        let m = 2 * self.n;
        let mut r = self
            .get(d, c, a)
            .partial(b)
            .sub(&self.get(b, c, a).partial(d));
        for e in 0..m {
            r.add_assign_ref(&self.get(d, c, e).mul(&self.get(b, e, a)));
            r.sub_assign_ref(&self.get(b, c, e).mul(&self.get(d, e, a)));
        }
        r
    }

    /// `tr(∇²|P) = Σ_{b<d} (Σ_{a ∈ y} R^a_{abd}) dz_b ∧ dz_d`.
    pub fn trace_form(&self) -> BaseForm {
        let n = self.n;
        let mut out = BaseForm::zero(n, self.order);
        for b in 0..2 * n {
            for d in b + 1..2 * n {
                let mut s = TSeries::zero(n, self.order);
                for a in n..2 * n {
                    s.add_assign_ref(&self.riemann(a, a, b, d));
                }
                out.add_term((1 << b) | (1 << d), &s);
            }
        }
        out
    }

    /// The same connection expressed in coordinates `z`, where this data is
    /// given in coordinates `z' = Φ(z)` and `Φ ≡ id mod t`.
    pub fn transport(&self, phi: &[TSeries]) -> ChristoffelData {
        let n = self.n;
        let m = 2 * n;
        let order = self.order;
        assert_eq!(phi.len(), m, "one component per coordinate");
        let jac: Vec<Vec<TSeries>> = (0..m)
            .map(|p| (0..m).map(|b| phi[p].partial(b)).collect())
            .collect();
        // J = I + K with K = O(t); J⁻¹ = Σ (−K)^k.
        let ident = |p: usize, q: usize| {
            if p == q {
                TSeries::one(n, order)
            } else {
                TSeries::zero(n, order)
            }
        };
        let k: Vec<Vec<TSeries>> = (0..m)
            .map(|p| (0..m).map(|q| jac[p][q].sub(&ident(p, q))).collect())
            .collect();
        for row in &k {
            for e in row {
                assert!(
                    e.coeff(0).is_zero(),
                    "coordinate change must be the identity at t = 0"
                );
            }
        }
        let matmul = |a: &Vec<Vec<TSeries>>, b: &Vec<Vec<TSeries>>| -> Vec<Vec<TSeries>> {
            (0..m)
                .map(|p| {
                    (0..m)
                        .map(|q| {
                            let mut s = TSeries::zero(n, order);
                            for r in 0..m {
                                s.add_assign_ref(&a[p][r].mul(&b[r][q]));
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        let mut inv: Vec<Vec<TSeries>> = (0..m)
            .map(|p| (0..m).map(|q| ident(p, q)).collect())
            .collect();
        let negk: Vec<Vec<TSeries>> = k
            .iter()
            .map(|r| r.iter().map(|e| e.neg()).collect())
            .collect();
        let mut pow = inv.clone();
        for _ in 0..order {
            pow = matmul(&pow, &negk);
            for p in 0..m {
                for q in 0..m {
                    inv[p][q].add_assign_ref(&pow[p][q]);
                }
            }
        }
        let composed: BTreeMap<(usize, usize, usize), TSeries> = self
            .entries
            .iter()
            .map(|(key, v)| (*key, v.compose(phi)))
            .collect();
        let mut out = ChristoffelData::flat(n, order);
        for b in 0..m {
            for c in 0..m {
                // Γ'^p_{qr}(Φ) J^q_b J^r_c + ∂_b ∂_c Φ^p
                let mut inner: Vec<TSeries> =
                    (0..m).map(|p| phi[p].partial(b).partial(c)).collect();
                for ((q, r, p), v) in &composed {
                    inner[*p].add_assign_ref(&v.mul(&jac[*q][b]).mul(&jac[*r][c]));
                }
                for a in 0..m {
                    let mut s = TSeries::zero(n, order);
                    for p in 0..m {
                        s.add_assign_ref(&inv[a][p].mul(&inner[p]));
                    }
                    out.set(b, c, a, s);
                }
            }
        }
        out
    }
}

fn omega_matrix(omega: &BaseForm) -> Vec<Vec<TSeries>> {
    let n = omega.n();
    let m = 2 * n;
    let mut w = vec![vec![TSeries::zero(n, omega.order()); m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let c = omega.coeff((1 << i) | (1 << j));
            w[j][i] = c.neg();
            w[i][j] = c;
        }
    }
    w
}

fn name(n: usize, i: usize) -> String {
    crate::algebra::poly::coord_name(n, i)
}

/// Checks the three defining conditions of a `P`-symplectic connection.
pub fn validate_connection(gamma: &ChristoffelData, omega: &BaseForm) -> ValidityReport {
    let n = gamma.n;
    let m = 2 * n;
    let w = omega_matrix(omega);
    let mut symplectic = CheckOutcome::pass();
    'sym: for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if gamma.get(i, j, k) != gamma.get(j, i, k) {
                    symplectic = CheckOutcome::fail(format!(
                        "torsion: Γ^{}_{{{}{}}} ≠ Γ^{}_{{{}{}}}",
                        name(n, k),
                        name(n, i),
                        name(n, j),
                        name(n, k),
                        name(n, j),
                        name(n, i)
                    ));
                    break 'sym;
                }
            }
        }
        for k in 0..m {
            for j in 0..m {
                // ∂_k ω_ij − Γ^l_{ki} ω_lj − Γ^l_{kj} ω_il
                let mut s = w[i][j].partial(k);
                for l in 0..m {
                    s.sub_assign_ref(&gamma.get(k, i, l).mul(&w[l][j]));
                    s.sub_assign_ref(&gamma.get(k, j, l).mul(&w[i][l]));
                }
                if !s.is_zero() {
                    symplectic = CheckOutcome::fail(format!(
                        "(∇_{} ω)({}, {}) = {}",
                        name(n, k),
                        name(n, i),
                        name(n, j),
                        s
                    ));
                    break 'sym;
                }
            }
        }
    }
    let mut preserves_p = CheckOutcome::pass();
    'pp: for i in 0..m {
        for b in n..m {
            for a in 0..n {
                let v = gamma.get(i, b, a);
                if !v.is_zero() {
                    preserves_p = CheckOutcome::fail(format!(
                        "Γ^{}_{{{}{}}} = {}",
                        name(n, a),
                        name(n, i),
                        name(n, b),
                        v
                    ));
                    break 'pp;
                }
            }
        }
    }
    let mut flat_on_p = CheckOutcome::pass();
    'fp: for b in n..m {
        for d in n..m {
            for c in n..m {
                for a in 0..m {
                    let v = gamma.riemann(a, c, b, d);
                    if !v.is_zero() {
                        flat_on_p = CheckOutcome::fail(format!(
                            "R^{}_{{{}{}{}}} = {}",
                            name(n, a),
                            name(n, c),
                            name(n, b),
                            name(n, d),
                            v
                        ));
                        break 'fp;
                    }
                }
            }
        }
    }
    ValidityReport {
        symplectic,
        preserves_p,
        flat_on_p,
    }
}

/// A validated connection acting on the Fedosov algebra as
/// `∇ = d + (1/t) ad(Γ̂)`.
#[derive(Clone, Debug)]
pub struct LiftedConnection {
    gamma: ChristoffelData,
    wick: FiberElement,
    weyl: FiberElement,
}

/// `Γ̂ = Σ_b q_b ⊗ dz_b` with `q_b = ½ Σ_i (ŷ_i L_b(x̂_i) − x̂_i L_b(ŷ_i))` and
/// `L_b(ẑ_a) = −Γ^a_{bc} ẑ_c`.
fn gamma_hat(gamma: &ChristoffelData, tag: Ordering) -> FiberElement {
    let n = gamma.n;
    let m = 2 * n;
    let order = gamma.order;
    let mut out = FiberElement::zero(n, order, tag);
    let half = Scalar::frac(1, 2);
    for b in 0..m {
        for i in 0..n {
            for c in 0..m {
                // ½ ŷ_i · (−Γ^{x_i}_{bc}) ẑ_c
                let gx = gamma.get(b, c, i);
                // −½ x̂_i · (−Γ^{y_i}_{bc}) ẑ_c
                let gy = gamma.get(b, c, n + i);
                for (coef, other) in [(gx.scale(&-&half), n + i), (gy.scale(&half), i)] {
                    if coef.is_zero() {
                        continue;
                    }
                    let mut fib = vec![0; m];
                    fib[other] += 1;
                    fib[c] += 1;
                    for (k, p) in coef.coeffs().iter().enumerate() {
                        out.add_term(
                            FKey {
                                fib: fib.clone(),
                                wedge: 1 << b,
                                tp: k as u32,
                            },
                            p,
                        );
                    }
                }
            }
        }
    }
    out
}

impl LiftedConnection {
    pub fn new(gamma: &ChristoffelData) -> Self {
        LiftedConnection {
            gamma: gamma.clone(),
            wick: gamma_hat(gamma, Ordering::Wick),
            weyl: gamma_hat(gamma, Ordering::Weyl),
        }
    }

    /// Validates against the standard form before lifting.
    pub fn checked(gamma: &ChristoffelData) -> Result<Self, EngineError> {
        let report = validate_connection(gamma, &BaseForm::standard_omega(gamma.n, gamma.order));
        if !report.all_passed() {
            let w = [&report.symplectic, &report.preserves_p, &report.flat_on_p]
                .iter()
                .find_map(|c| c.witness.clone())
                .unwrap_or_default();
            return Err(EngineError::InvalidConnection(w));
        }
        Ok(LiftedConnection::new(gamma))
    }

    pub fn christoffel(&self) -> &ChristoffelData {
        &self.gamma
    }

    /// `Γ̂` in the requested ordering.
    pub fn gamma_hat(&self, tag: Ordering) -> &FiberElement {
        match tag {
            Ordering::Wick => &self.wick,
            Ordering::Weyl => &self.weyl,
        }
    }

    /// `∇a = da + (1/t)[Γ̂, a]`.
    pub fn apply(&self, a: &FiberElement) -> FiberElement {
        a.d_base().add(&self.gamma_hat(a.tag()).bracket_over_t(a))
    }

    /// `R = dΓ̂ + (1/t) Γ̂∘Γ̂` in the requested ordering.
    pub fn curvature_element(&self, tag: Ordering) -> FiberElement {
        let g = self.gamma_hat(tag);
        g.d_base()
            .add(&g.bracket_over_t(g).scale(&Scalar::frac(1, 2)))
    }

    pub fn curvature(&self) -> CurvatureRealization {
        CurvatureRealization {
            r_wick: self.curvature_element(Ordering::Wick),
            r_weyl: self.curvature_element(Ordering::Weyl),
            trace_form: self.gamma.trace_form(),
        }
    }
}

/// The curvature of a connection in both realizations together with the
/// classical trace of its restriction to `P`.
#[derive(Clone, Debug)]
pub struct CurvatureRealization {
    pub r_wick: FiberElement,
    pub r_weyl: FiberElement,
    pub trace_form: BaseForm,
}

impl CurvatureRealization {
    /// `R_weyl − reorder(R_wick)`; equals `(t/2) tr(∇²|P)` as a scalar form.
    pub fn realization_shift(&self) -> FiberElement {
        self.r_weyl.sub(&self.r_wick.reorder(Ordering::Weyl))
    }
}
