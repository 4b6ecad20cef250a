//! Exact nullspaces over 𝔽_p and ℚ.
//!
//! Both solvers bring the matrix to reduced row echelon form and return the
//! kernel basis indexed by free columns: the vector for free column `f` has
//! a 1 at `f`, zeros at the other free columns, and minus the pivot-row
//! entries of column `f` at the pivot columns.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{pow_mod, FieldSpec, Scalar};

/// A matrix over 𝔽_p in reduced row echelon form.
struct FpEchelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    ncols: usize,
    p: u64,
}

/// Gauss–Jordan elimination over 𝔽_p with delayed reduction.
///
/// Entries stay in `u64` and a row is reduced only when another
/// multiply-add could overflow; for small `p` this skips almost every `%`.
fn fp_rref(mut rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> FpEchelon {
    let sq = (p - 1) * (p - 1);
    let budget = (u64::MAX - p) / sq.max(1);
    let mut adds = vec![0u64; rows.len()];
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] % p != 0) else {
            continue;
        };
        rows.swap(r, pr);
        adds.swap(r, pr);
        let inv = pow_mod(rows[r][c] % p, p - 2, p);
        let pivot: Vec<u64> = {
            let row = &mut rows[r];
            for v in row[c..].iter_mut() {
                *v = (*v % p) * inv % p;
            }
            row.clone()
        };
        adds[r] = 0;
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c] % p;
            if f == 0 {
                row[c] = 0;
                continue;
            }
            if adds[i] >= budget {
                for v in row[c..].iter_mut() {
                    *v %= p;
                }
                adds[i] = 0;
            }
            let g = p - f;
            for (v, &pv) in row[c..].iter_mut().zip(&pivot[c..]) {
                *v += g * pv;
            }
            row[c] = 0;
            adds[i] += 1;
        }
        pivots.push(c);
        r += 1;
    }
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            *v %= p;
        }
    }
    rows.truncate(r.max(pivots.len()));
    FpEchelon { rows, pivots, ncols, p }
}

impl FpEchelon {
    fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    fn kernel_vector(&self, free: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.ncols];
        v[free] = 1;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            v[pc] = (self.p - row[free]) % self.p;
        }
        v
    }
}

/// Rank of a matrix over 𝔽_p given by rows of residues.
pub fn rank_fp(rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> usize {
    fp_rref(rows, ncols, p).pivots.len()
}

/// Kernel basis over 𝔽_p, one vector per free column in increasing order.
pub fn nullspace_fp(rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let e = fp_rref(rows, ncols, p);
    e.free_columns().into_iter().map(|f| e.kernel_vector(f)).collect()
}

/// Reduced row echelon form over ℚ.
fn q_rref(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for v in rows[r][c..].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row[c..].iter_mut().zip(&pivot[c..]) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Kernel basis over ℚ, one vector per free column in increasing order.
pub fn nullspace_q(rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let (rows, pivots) = q_rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Kernel basis for a matrix of scalars in any supported field.
pub fn nullspace(field: FieldSpec, rows: &[Vec<Scalar>], ncols: usize) -> Result<Vec<Vec<Scalar>>> {
    for row in rows {
        if row.len() != ncols {
            return Err(Error::ArityMismatch {
                expected: ncols,
                got: row.len(),
            });
        }
    }
    match field.modulus() {
        Some(p) => {
            let raw = rows
                .iter()
                .map(|r| r.iter().map(|s| s.residue().expect("prime-field entry")).collect())
                .collect();
            Ok(nullspace_fp(raw, ncols, p)
                .into_iter()
                .map(|v| v.into_iter().map(|x| Scalar::from_u64(field, x)).collect())
                .collect())
        }
        None => {
            let raw = rows
                .iter()
                .map(|r| r.iter().map(|s| s.as_rational().expect("rational entry").clone()).collect())
                .collect();
            nullspace_q(raw, ncols)
                .into_iter()
                .map(|v| v.iter().map(|x| Scalar::from_rational(field, x)).collect())
                .collect()
        }
    }
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_first_nonzero(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().find(|c| !c.is_zero()) {
        Some(lead) => {
            let inv = lead.inv().expect("nonzero");
            v.iter().map(|c| c * &inv).collect()
        }
        None => v.to_vec(),
    }
}
