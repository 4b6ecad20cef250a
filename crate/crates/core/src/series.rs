//! Truncated power series in one variable `s`, stored as [`UniPoly`] values
//! reduced modulo `s^n`.

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::{MultiPoly, UniPoly};

pub fn truncate(a: &UniPoly, n: usize) -> UniPoly {
    UniPoly::from_coeffs(a.field(), a.coeffs().iter().take(n).cloned().collect())
}

pub fn mul_trunc(a: &UniPoly, b: &UniPoly, n: usize) -> UniPoly {
    let field = a.field();
    let mut out = vec![Scalar::zero(field); n];
    for (i, ai) in a.coeffs().iter().enumerate().take(n) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs().iter().enumerate().take(n - i) {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    UniPoly::from_coeffs(field, out)
}

/// `1/a mod s^n` by Newton iteration `b ← b(2 - ab)`.
pub fn inverse_trunc(a: &UniPoly, n: usize) -> Result<UniPoly> {
    let field = a.field();
    let a0 = a.coeff(0);
    if a0.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let two = UniPoly::constant(Scalar::from_i64(field, 2));
    let mut b = UniPoly::constant(a0.inv()?);
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let ab = mul_trunc(a, &b, prec);
        b = mul_trunc(&b, &(&two - &ab), prec);
    }
    Ok(truncate(&b, n))
}

/// The branch `h(s) = y0 + c_1 s + … + c_{n-1} s^{n-1}` with
/// `f(x0 + s, h(s)) ≡ 0 mod s^n`, by Newton's method on power series.
///
/// Requires `f(x0, y0) = 0` and `f_y(x0, y0) ≠ 0`; the branch is then unique.
pub fn implicit_branch(f: &MultiPoly, x0: &Scalar, y0: &Scalar, n: usize) -> Result<UniPoly> {
    let field = f.field();
    let fy = f.partial_derivative(1)?;
    let xs = UniPoly::from_coeffs(field, vec![x0.clone(), Scalar::one(field)]);
    let mut h = UniPoly::constant(y0.clone());
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let val = truncate(&f.substitute_univariate(&[xs.clone(), h.clone()])?, prec);
        let slope = truncate(&fy.substitute_univariate(&[xs.clone(), h.clone()])?, prec);
        let step = mul_trunc(&val, &inverse_trunc(&slope, prec)?, prec);
        h = truncate(&(&h - &step), prec);
    }
    Ok(truncate(&h, n))
}
