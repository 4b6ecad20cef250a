//! Sylvester resultant eliminating `y` from two polynomials in `x, y`.

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::{MultiPoly, UniPoly};

/// `Res_y(f, g)` as a polynomial in `x`.
///
/// The determinant of the Sylvester matrix is computed by fraction-free
/// (Bareiss) elimination over `K[x]`, so every intermediate division is exact.
/// If either input has `y`-degree zero the usual convention
/// `Res(a, g) = a^deg_y(g)` applies.
pub fn resultant_y(f: &MultiPoly, g: &MultiPoly) -> Result<UniPoly> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.field().check_same(&g.field())?;
    let fc = f.coefficients_in_y()?;
    let gc = g.coefficients_in_y()?;
    let (m, n) = (fc.len() - 1, gc.len() - 1);
    if m == 0 {
        return Ok(fc[0].pow(n as u32));
    }
    if n == 0 {
        return Ok(gc[0].pow(m as u32));
    }
    let field = f.field();
    let size = m + n;
    let zero = UniPoly::zero(field);
    let mut mat = vec![vec![zero.clone(); size]; size];
    // Rows hold coefficients from the highest power of y down.
    for r in 0..n {
        for (j, c) in fc.iter().rev().enumerate() {
            mat[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in gc.iter().rev().enumerate() {
            mat[n + r][r + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

/// Determinant of a square matrix over `K[x]` by Bareiss elimination.
pub fn bareiss_determinant(mut mat: Vec<Vec<UniPoly>>) -> Result<UniPoly> {
    let size = mat.len();
    let field = match mat.first().and_then(|r| r.first()) {
        Some(e) => e.field(),
        None => return Err(Error::Internal("empty matrix".into())),
    };
    let mut sign_negative = false;
    let mut prev = UniPoly::one(field);
    for k in 0..size {
        if mat[k][k].is_zero() {
            let Some(swap) = (k + 1..size).find(|&r| !mat[r][k].is_zero()) else {
                return Ok(UniPoly::zero(field));
            };
            mat.swap(k, swap);
            sign_negative = !sign_negative;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&mat[i][j] * &mat[k][k]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.exact_div(&prev)?;
            }
            mat[i][k] = UniPoly::zero(field);
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    Ok(if sign_negative {
        det.scale(&-Scalar::one(field))
    } else {
        det
    })
}
