//! Radial homotopy operators for the de Rham complex on the chart.

use super::form::{wedge_dirs, BaseForm};
use super::poly::ChartPoly;
use super::scalar::Scalar;
use super::series::TSeries;
use crate::error::AlgebraError;

/// `h(α) = ∫₀¹ i_E α(s·z) ds` with `E` the Euler field. On `z^e dz^I` this is
/// `z^e · i_E dz^I / (|e| + |I|)`.
pub fn radial_homotopy(a: &BaseForm) -> BaseForm {
    let n = a.n();
    let order = a.order();
    let mut out = BaseForm::zero(n, order);
    for (w, c) in a.terms() {
        let k = w.count_ones();
        if k == 0 {
            continue;
        }
        for (pos, j) in wedge_dirs(*w).into_iter().enumerate() {
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let mut coeffs = Vec::with_capacity(order + 1);
            for p in c.coeffs() {
                let mut q = ChartPoly::zero(n);
                for (e, v) in p.terms() {
                    let m: u32 = e.iter().sum();
                    let mut e2 = e.clone();
                    e2[j] += 1;
                    let f = &Scalar::frac(sign, (m + k) as i64) * v;
                    q.add_term(e2, &f);
                }
                coeffs.push(q);
            }
            out.add_term(w & !(1 << j), &TSeries::from_coeffs(n, order, coeffs));
        }
    }
    out
}

/// A primitive of a closed form of positive degree.
pub fn poincare_homotopy(a: &BaseForm) -> Result<BaseForm, AlgebraError> {
    if !a.is_closed() {
        return Err(AlgebraError::NotClosed);
    }
    if a.terms().any(|(w, _)| *w == 0) {
        return Err(AlgebraError::NotClosed);
    }
    Ok(radial_homotopy(a))
}

/// `∫₀¹ Σ y_i v_i(x, s·y) ds` for the `dy`-part `Σ v_i dy_i` of a 1-form: a
/// function whose `y`-gradient is the `dy`-part whenever that part is closed
/// along the fibers.
pub fn fiber_primitive(a: &BaseForm) -> TSeries {
    let n = a.n();
    let order = a.order();
    let mut coeffs = vec![ChartPoly::zero(n); order + 1];
    for i in 0..n {
        let v = a.coeff(1 << (n + i));
        for (k, p) in v.coeffs().iter().enumerate() {
            for (e, c) in p.terms() {
                let my: u32 = e[n..].iter().sum();
                let mut e2 = e.clone();
                e2[n + i] += 1;
                coeffs[k].add_term(e2, &(c * &Scalar::frac(1, (my + 1) as i64)));
            }
        }
    }
    TSeries::from_coeffs(n, order, coeffs)
}
