//! Formal Darboux coordinates, formal automorphisms of the chart, and the
//! characteristic form of a polarized star-product.
//!
//! Brackets follow `{y_i, x_j} = δ_ij`. Automorphisms are coordinate
//! substitutions `z ↦ ψ(z)` with `ψ ≡ z mod t`; the pullback of `f` is
//! `f ∘ ψ`.

use crate::algebra::form::BaseForm;
use crate::algebra::homotopy::{fiber_primitive, poincare_homotopy};
use crate::algebra::poly::{monomials_up_to, ChartPoly};
use crate::algebra::scalar::Scalar;
use crate::algebra::series::TSeries;
use crate::engine::StarProduct;
use crate::error::{AlgebraError, EngineError};
use crate::hochschild::{DiffSeries, MultiDiffOp};

fn coordinates(n: usize, order: usize) -> Vec<TSeries> {
    (0..2 * n)
        .map(|j| TSeries::from_poly(ChartPoly::var(n, j), order))
        .collect()
}

/// A perturbation of the identity substitution with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalAutomorphism {
    n: usize,
    order: usize,
    subs: Vec<TSeries>,
    inverse: Vec<TSeries>,
}

/// `φ` with `ψ(φ(z)) = z`, by `φ ← z − (ψ − z)(φ)`.
fn invert_substitution(psi: &[TSeries], n: usize, order: usize) -> Vec<TSeries> {
    let z = coordinates(n, order);
    let delta: Vec<TSeries> = psi.iter().zip(&z).map(|(p, c)| p.sub(c)).collect();
    let mut phi = z.clone();
    for _ in 0..=order {
        phi = z
            .iter()
            .zip(&delta)
            .map(|(c, d)| c.sub(&d.compose(&phi)))
            .collect();
    }
    phi
}

impl FormalAutomorphism {
    pub fn identity(n: usize, order: usize) -> Self {
        let z = coordinates(n, order);
        FormalAutomorphism {
            n,
            order,
            subs: z.clone(),
            inverse: z,
        }
    }

    /// The substitution `z_j ↦ subs[j]`; each image must reduce to `z_j` at
    /// `t = 0`.
    pub fn new(subs: Vec<TSeries>) -> Result<Self, EngineError> {
        let first = subs
            .first()
            .ok_or_else(|| EngineError::Precondition("empty substitution".into()))?;
        let (n2, order) = (subs.len(), first.order());
        let n = first.n();
        if n2 != 2 * n {
            return Err(AlgebraError::DimensionMismatch(n2, 2 * n).into());
        }
        for (j, s) in subs.iter().enumerate() {
            if s.order() != order {
                return Err(AlgebraError::OrderMismatch(s.order(), order).into());
            }
            if *s.coeff(0) != ChartPoly::var(n, j) {
                return Err(EngineError::Precondition(format!(
                    "image of coordinate {} is not the identity at order 0",
                    j
                )));
            }
        }
        let inverse = invert_substitution(&subs, n, order);
        Ok(FormalAutomorphism {
            n,
            order,
            subs,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn substitution(&self) -> &[TSeries] {
        &self.subs
    }

    pub fn inverse_substitution(&self) -> &[TSeries] {
        &self.inverse
    }

    pub fn inverse(&self) -> FormalAutomorphism {
        FormalAutomorphism {
            n: self.n,
            order: self.order,
            subs: self.inverse.clone(),
            inverse: self.subs.clone(),
        }
    }

    /// The map `z ↦ self(other(z))`.
    pub fn compose(&self, other: &FormalAutomorphism) -> FormalAutomorphism {
        let subs: Vec<TSeries> = self.subs.iter().map(|s| s.compose(&other.subs)).collect();
        let inverse: Vec<TSeries> = other
            .inverse
            .iter()
            .map(|s| s.compose(&self.inverse))
            .collect();
        FormalAutomorphism {
            n: self.n,
            order: self.order,
            subs,
            inverse,
        }
    }

    pub fn pullback(&self, f: &TSeries) -> TSeries {
        f.compose(&self.subs)
    }

    pub fn pullback_form(&self, a: &BaseForm) -> BaseForm {
        a.pullback(&self.subs)
    }

    /// Whether every `x`-image depends on `x` and `t` only.
    pub fn preserves_o(&self) -> bool {
        self.subs[..self.n].iter().all(|s| s.depends_only_on_x())
    }

    pub fn is_identity(&self) -> bool {
        self.subs == coordinates(self.n, self.order)
    }

    pub fn to_literals(&self) -> Vec<String> {
        self.subs.iter().map(|s| s.to_literal()).collect()
    }
}

/// A vector field `Σ X^j ∂_j` with series components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalVectorField {
    comps: Vec<TSeries>,
}

impl FormalVectorField {
    pub fn new(comps: Vec<TSeries>) -> Self {
        FormalVectorField { comps }
    }

    pub fn zero(n: usize, order: usize) -> Self {
        FormalVectorField {
            comps: vec![TSeries::zero(n, order); 2 * n],
        }
    }

    pub fn components(&self) -> &[TSeries] {
        &self.comps
    }

    /// `X(f) = Σ X^j ∂_j f`.
    pub fn apply(&self, f: &TSeries) -> TSeries {
        let mut out = TSeries::zero(f.n(), f.order());
        for (j, c) in self.comps.iter().enumerate() {
            out.add_assign_ref(&c.mul(&f.partial(j)));
        }
        out
    }

    /// Whether the field has only `∂/∂y` components.
    pub fn in_p(&self) -> bool {
        let n = self.comps.len() / 2;
        self.comps[..n].iter().all(|c| c.is_zero())
    }

    /// `exp(tX)` as the substitution `z ↦ Σ_k t^k/k! X^k(z)`.
    pub fn exp_t(&self) -> FormalAutomorphism {
        let n = self.comps.len() / 2;
        let order = self.comps[0].order();
        let subs = coordinates(n, order)
            .into_iter()
            .map(|z| {
                let mut out = z.clone();
                let mut term = z;
                for k in 1..=order {
                    term = self
                        .apply(&term)
                        .shift_up(1)
                        .scale(&Scalar::frac(1, k as i64));
                    out.add_assign_ref(&term);
                }
                out
            })
            .collect();
        FormalAutomorphism::new(subs).expect("flow is the identity at order 0")
    }

    /// `L_X α = d(i_X α) + i_X dα`.
    pub fn lie_derivative(&self, a: &BaseForm) -> BaseForm {
        a.contract(&self.comps)
            .d()
            .add(&a.d().contract(&self.comps))
    }
}

/// A deformation `π_0 + t π_1 + …` of the standard Poisson bracket, stored
/// as bidifferential operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedBracket {
    table: DiffSeries,
}

fn swap_slots(op: &MultiDiffOp) -> MultiDiffOp {
    let mut out = MultiDiffOp::zero(op.n(), 2);
    for (idx, c) in op.terms() {
        out.add_term(vec![idx[1].clone(), idx[0].clone()], c);
    }
    out
}

fn standard_poisson(n: usize) -> MultiDiffOp {
    let mut out = MultiDiffOp::zero(n, 2);
    for i in 0..n {
        let mut x = vec![0; 2 * n];
        x[i] = 1;
        let mut y = vec![0; 2 * n];
        y[n + i] = 1;
        out.add_term(vec![y.clone(), x.clone()], &ChartPoly::one(n));
        out.add_term(vec![x, y], &-&ChartPoly::one(n));
    }
    out
}

impl DeformedBracket {
    pub fn from_table(table: DiffSeries) -> Self {
        assert_eq!(table.arity(), 2, "brackets are bidifferential");
        DeformedBracket { table }
    }

    /// The standard bracket `{f, g} = Σ ∂_y f ∂_x g − ∂_x f ∂_y g`.
    pub fn standard(n: usize, order: usize) -> Self {
        let mut table = DiffSeries::zero(n, order, 2);
        *table.part_mut(0) = standard_poisson(n);
        DeformedBracket { table }
    }

    /// `(1/t)(μ(f, g) − μ(g, f))`; loses one order of `μ`.
    pub fn from_star_product(mu: &StarProduct) -> Result<Self, EngineError> {
        if mu.order() == 0 {
            return Err(EngineError::Precondition(
                "a bracket needs a product of order at least 1".into(),
            ));
        }
        let order = mu.order() - 1;
        let parts = (0..=order)
            .map(|k| {
                let p = mu.part(k + 1);
                p.sub(&swap_slots(p))
            })
            .collect();
        Ok(DeformedBracket {
            table: DiffSeries::from_parts(mu.n(), order, 2, parts),
        })
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn table(&self) -> &DiffSeries {
        &self.table
    }

    pub fn eval(&self, f: &TSeries, g: &TSeries) -> TSeries {
        self.table
            .eval(&[f.with_order(self.order()), g.with_order(self.order())])
    }

    /// Whether `[a, b] = 0` for all `a, b` depending on `x` only.
    pub fn commutative_on_o(&self) -> bool {
        self.table.parts().iter().all(|p| p.is_polarized())
    }

    /// Checks `π_0`, antisymmetry, and Jacobi on monomials of degree `<= 2`.
    pub fn validate(&self) -> Result<(), EngineError> {
        let n = self.n();
        if *self.table.part(0) != standard_poisson(n) {
            return Err(EngineError::Precondition(
                "leading term is not the standard Poisson bracket".into(),
            ));
        }
        for (k, p) in self.table.parts().iter().enumerate() {
            if p.add(&swap_slots(p)) != MultiDiffOp::zero(n, 2) {
                return Err(EngineError::Precondition(format!(
                    "bracket is not antisymmetric at t^{}",
                    k
                )));
            }
        }
        let order = self.order();
        let basis: Vec<TSeries> = monomials_up_to(2 * n, 2)
            .into_iter()
            .skip(1)
            .map(|m| TSeries::from_poly(ChartPoly::monomial(n, m, Scalar::one()), order))
            .collect();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let fg = self.eval(&basis[i], &basis[j]);
                for k in j + 1..basis.len() {
                    let (f, g, h) = (&basis[i], &basis[j], &basis[k]);
                    let gh = self.eval(g, h);
                    let hf = self.eval(h, f);
                    let jac = self
                        .eval(f, &gh)
                        .add(&self.eval(g, &hf))
                        .add(&self.eval(h, &fg));
                    if !jac.is_zero() {
                        return Err(EngineError::Precondition(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            f.to_literal(),
                            g.to_literal(),
                            h.to_literal()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Formal Darboux coordinates `x̂_1..x̂_n, ŷ_1..ŷ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxCoordinates {
    pub x: Vec<TSeries>,
    pub y: Vec<TSeries>,
}

impl DarbouxCoordinates {
    pub fn standard(n: usize, order: usize) -> Self {
        let z = coordinates(n, order);
        DarbouxCoordinates {
            x: z[..n].to_vec(),
            y: z[n..].to_vec(),
        }
    }

    /// The splitting `s = Σ ŷ_i dx̂_i`.
    pub fn splitting(&self) -> BaseForm {
        let n = self.x.len();
        let order = self.x[0].order();
        let mut s = BaseForm::zero(n, order);
        for i in 0..n {
            s = s.add(
                &BaseForm::function(self.x[i].clone())
                    .d()
                    .mul_series(&self.y[i]),
            );
        }
        s
    }

    /// `ds = Σ dŷ_i ∧ dx̂_i`.
    pub fn form(&self) -> BaseForm {
        self.splitting().d()
    }

    /// Whether all `x̂` depend on `x` and `t` only.
    pub fn x_in_o(&self) -> bool {
        self.x.iter().all(|v| v.depends_only_on_x())
    }
}

/// Defects of the Darboux relations, as polynomials at `t^{m+1}`.
struct Defects {
    xx: Vec<Vec<TSeries>>,
    yx: Vec<Vec<TSeries>>,
    yy: Vec<Vec<TSeries>>,
}

fn defects(bracket: &DeformedBracket, c: &DarbouxCoordinates) -> Defects {
    let n = c.x.len();
    let order = bracket.order();
    let mut d = Defects {
        xx: vec![vec![TSeries::zero(n, order); n]; n],
        yx: vec![vec![TSeries::zero(n, order); n]; n],
        yy: vec![vec![TSeries::zero(n, order); n]; n],
    };
    for j in 0..n {
        for k in 0..n {
            d.xx[j][k] = bracket.eval(&c.x[j], &c.x[k]);
            let mut v = bracket.eval(&c.y[j], &c.x[k]);
            if j == k {
                v = v.sub(&TSeries::one(n, order));
            }
            d.yx[j][k] = v;
            d.yy[j][k] = bracket.eval(&c.y[j], &c.y[k]);
        }
    }
    d
}

/// Whether the coordinates satisfy every Darboux relation mod `t^{M+1}`.
pub fn check_darboux(bracket: &DeformedBracket, c: &DarbouxCoordinates) -> bool {
    let d = defects(bracket, c);
    d.xx.iter()
        .chain(&d.yx)
        .chain(&d.yy)
        .all(|row| row.iter().all(|v| v.is_zero()))
}

/// A primitive `λ` with no `dy` factors of a closed 2-form in `dP^⊥`.
pub fn p_perp_potential(a: &BaseForm) -> Result<BaseForm, EngineError> {
    if !a.in_dp_perp() {
        return Err(EngineError::Precondition(
            "form is not a closed form without dy∧dy terms".into(),
        ));
    }
    let h = poincare_homotopy(a)?;
    let f = fiber_primitive(&h);
    let out = h.sub(&BaseForm::function(f).d());
    debug_assert!(out.in_p_perp());
    Ok(out)
}

/// Corrects coordinates that are Darboux mod `t^k` into coordinates that are
/// Darboux mod `t^{M+1}`, changing only orders `>= k`.
pub fn extend_darboux(
    bracket: &DeformedBracket,
    coords: &DarbouxCoordinates,
    k: usize,
) -> Result<DarbouxCoordinates, EngineError> {
    let n = bracket.n();
    let order = bracket.order();
    if coords.x.len() != n || coords.y.len() != n {
        return Err(AlgebraError::DimensionMismatch(coords.x.len(), n).into());
    }
    if !bracket.commutative_on_o() {
        return Err(EngineError::Precondition(
            "bracket is not commutative on O".into(),
        ));
    }
    if !coords.x_in_o() {
        return Err(EngineError::Precondition(
            "x-coordinates must lie in O".into(),
        ));
    }
    let mut c = DarbouxCoordinates {
        x: coords.x.iter().map(|v| v.with_order(order)).collect(),
        y: coords.y.iter().map(|v| v.with_order(order)).collect(),
    };
    let k = k.max(1);
    {
        let d = defects(bracket, &c);
        for rows in [&d.xx, &d.yx, &d.yy] {
            for v in rows.iter().flatten() {
                if v.valuation().is_some_and(|m| m < k) {
                    return Err(EngineError::Precondition(format!(
                        "input coordinates are not Darboux mod t^{}",
                        k
                    )));
                }
            }
        }
    }
    for m1 in k..=order {
        let d = defects(bracket, &c);
        let mut alpha = BaseForm::zero(n, order);
        for j in 0..n {
            for l in 0..n {
                if !d.xx[j][l].coeff(m1).is_zero() {
                    return Err(EngineError::Precondition(
                        "x-coordinates stopped commuting".into(),
                    ));
                }
                let y = TSeries::from_poly(d.yx[j][l].coeff(m1).clone(), order);
                alpha.add_term((1 << j) | (1 << (n + l)), &y.neg());
                if j < l {
                    let z = TSeries::from_poly(d.yy[j][l].coeff(m1).clone(), order);
                    alpha.add_term((1 << j) | (1 << l), &z);
                }
            }
        }
        if alpha.is_zero() {
            continue;
        }
        if !alpha.is_closed() {
            return Err(EngineError::Precondition(format!(
                "defect form at t^{} is not closed; the bracket is invalid",
                m1
            )));
        }
        let beta = poincare_homotopy(&alpha)?;
        // β = Σ A_k dy_k − Σ B_j dx_j; move the y-dependence of A into B.
        let mut dy_part = BaseForm::zero(n, order);
        for l in 0..n {
            let a = beta.coeff(1 << (n + l));
            let a0 = a.compose(&at_y_zero_subs(n, order));
            dy_part.add_term(1 << (n + l), &a.sub(&a0));
        }
        let f0 = fiber_primitive(&dy_part);
        let beta = beta.sub(&BaseForm::function(f0).d());
        for l in 0..n {
            let a = beta.coeff(1 << (n + l));
            if !a.depends_only_on_x() {
                return Err(EngineError::Precondition(
                    "x-correction leaves O; the bracket does not preserve O".into(),
                ));
            }
            c.x[l] = c.x[l].add(&a.shift_up(m1));
        }
        for j in 0..n {
            let b = beta.coeff(1 << j).neg();
            c.y[j] = c.y[j].add(&b.shift_up(m1));
        }
    }
    if !check_darboux(bracket, &c) {
        return Err(EngineError::NonConvergence(
            "corrected coordinates fail the Darboux relations".into(),
        ));
    }
    Ok(c)
}

fn at_y_zero_subs(n: usize, order: usize) -> Vec<TSeries> {
    (0..2 * n)
        .map(|j| {
            if j < n {
                TSeries::from_poly(ChartPoly::var(n, j), order)
            } else {
                TSeries::zero(n, order)
            }
        })
        .collect()
}

/// Darboux coordinates for `bracket` lifting the chart coordinates, with
/// `x̂ ∈ O`.
pub fn lift_darboux(bracket: &DeformedBracket) -> Result<DarbouxCoordinates, EngineError> {
    bracket.validate()?;
    extend_darboux(
        bracket,
        &DarbouxCoordinates::standard(bracket.n(), bracket.order()),
        1,
    )
}

/// A second lift starting from `x̂ = x + t·seed(x)`.
pub fn lift_darboux_seeded(
    bracket: &DeformedBracket,
    seed: &[TSeries],
) -> Result<DarbouxCoordinates, EngineError> {
    bracket.validate()?;
    let n = bracket.n();
    let order = bracket.order();
    let mut c = DarbouxCoordinates::standard(n, order);
    for (i, s) in seed.iter().enumerate().take(n) {
        c.x[i] = c.x[i].add(&s.with_order(order).shift_up(1));
    }
    extend_darboux(bracket, &c, 1)
}

/// `exp(t ad B)(f)` with `ad B = [B, ·]`.
pub fn exp_t_ad(bracket: &DeformedBracket, b: &TSeries, f: &TSeries) -> TSeries {
    let order = bracket.order();
    let mut out = f.with_order(order);
    let mut term = out.clone();
    for k in 1..=order {
        term = bracket
            .eval(b, &term)
            .shift_up(1)
            .scale(&Scalar::frac(1, k as i64));
        if term.is_zero() {
            break;
        }
        out.add_assign_ref(&term);
    }
    out
}

/// `B` with `exp(t ad B)` mapping the first system to the second.
pub fn inner_automorphism(
    bracket: &DeformedBracket,
    sys1: &DarbouxCoordinates,
    sys2: &DarbouxCoordinates,
) -> Result<TSeries, EngineError> {
    let n = bracket.n();
    let order = bracket.order();
    for (a, b) in sys1
        .x
        .iter()
        .chain(&sys1.y)
        .zip(sys2.x.iter().chain(&sys2.y))
    {
        if a.coeff(0) != b.coeff(0) {
            return Err(EngineError::Precondition(
                "systems differ at order 0".into(),
            ));
        }
    }
    let mut b = TSeries::zero(n, order);
    for m in 0..order {
        let mut alpha = BaseForm::zero(n, order);
        for j in 0..n {
            let dx = sys2.x[j]
                .with_order(order)
                .sub(&exp_t_ad(bracket, &b, &sys1.x[j]));
            let dy = sys2.y[j]
                .with_order(order)
                .sub(&exp_t_ad(bracket, &b, &sys1.y[j]));
            for (v, w, sign) in [(&dx, 1 << (n + j), 1), (&dy, 1 << j, -1)] {
                if v.valuation().is_some_and(|d| d <= m) {
                    return Err(EngineError::NonConvergence(format!(
                        "defect below order {} remains",
                        m + 1
                    )));
                }
                let c = TSeries::from_poly(v.coeff(m + 1).clone(), order);
                alpha.add_term(w, &c.scale(&Scalar::from_int(sign)));
            }
        }
        if alpha.is_zero() {
            continue;
        }
        if !alpha.is_closed() {
            return Err(EngineError::Precondition(
                "systems are not both Darboux for the bracket".into(),
            ));
        }
        let f = poincare_homotopy(&alpha)?.coeff(0);
        b = b.add(&f.shift_up(m));
    }
    for (a, c) in sys1
        .x
        .iter()
        .chain(&sys1.y)
        .zip(sys2.x.iter().chain(&sys2.y))
    {
        if exp_t_ad(bracket, &b, a) != c.with_order(order) {
            return Err(EngineError::NonConvergence(
                "inner automorphism does not match".into(),
            ));
        }
    }
    Ok(b)
}

/// Whether `μ(a, g) = ag` for every `a` depending on `x` only.
pub fn is_psp(mu: &StarProduct) -> bool {
    mu.table().parts()[1..]
        .iter()
        .all(|p| p.is_strongly_polarized())
}

/// Whether `μ(a, b) = ab` for all `a, b` depending on `x` only.
pub fn is_wpsp(mu: &StarProduct) -> bool {
    mu.table().parts()[1..].iter().all(|p| p.is_polarized())
}

/// The characteristic form `ω_t = d(Σ ŷ_i dx̂_i)` of a PSP, mod `t^N` for a
/// product of order `N`.
pub fn characteristic_form(
    mu: &StarProduct,
) -> Result<(BaseForm, DarbouxCoordinates), EngineError> {
    if !is_psp(mu) {
        return Err(EngineError::Precondition("product is not polarized".into()));
    }
    let bracket = DeformedBracket::from_star_product(mu)?;
    let c = lift_darboux(&bracket)?;
    Ok((c.form(), c))
}

/// The substitution `A` with `A^* ω_t = ω_0`, preserving `O`.
pub fn trivialize_pair(omega_t: &BaseForm) -> Result<FormalAutomorphism, EngineError> {
    let n = omega_t.n();
    let order = omega_t.order();
    let omega0 = BaseForm::standard_omega(n, order);
    let diff = omega_t.sub(&omega0);
    if diff.terms().any(|(_, c)| !c.coeff(0).is_zero()) {
        return Err(EngineError::Precondition(
            "form is not standard at order 0".into(),
        ));
    }
    let lambda = p_perp_potential(&diff)?;
    let mut phi = coordinates(n, order);
    for i in 0..n {
        phi[n + i] = phi[n + i].add(&lambda.coeff(1 << i));
    }
    let a = FormalAutomorphism::new(phi)?.inverse();
    if a.pullback_form(omega_t) != omega0 || !a.preserves_o() {
        return Err(EngineError::NonConvergence(
            "trivialization check failed".into(),
        ));
    }
    Ok(a)
}

/// Result of moving a form along `exp(tX)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitStep {
    pub form: BaseForm,
    /// `λ` without `dy` factors with `form − ω_t = t dλ`, when one exists.
    pub potential: Option<BaseForm>,
}

/// `exp(tX)^* ω_t`, with the `P^⊥` potential of the change when available.
pub fn lie_orbit_step(omega_t: &BaseForm, x: &FormalVectorField) -> Result<OrbitStep, EngineError> {
    if !omega_t.is_closed() {
        return Err(AlgebraError::NotClosed.into());
    }
    let form = x.exp_t().pullback_form(omega_t);
    let diff = form.sub(omega_t);
    let potential = if diff.is_zero() {
        Some(BaseForm::zero(omega_t.n(), omega_t.order()))
    } else if diff.terms().all(|(_, c)| c.coeff(0).is_zero()) {
        let over_t = diff.map(|c| c.shift_down(1));
        p_perp_potential(&over_t).ok()
    } else {
        None
    };
    Ok(OrbitStep { form, potential })
}
