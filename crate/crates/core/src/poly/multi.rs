use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::UniPoly;

/// Exponent vector ordered by total degree, ties broken lexicographically
/// with `x > y > z_1 > …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `num_vars` variables of total degree at most `max_degree`,
/// in descending graded-lex order.
pub fn monomials_up_to(num_vars: usize, max_degree: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: usize, remaining: u32, out: &mut Vec<Monomial>) {
        if left == 1 {
            prefix.push(remaining);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(prefix, left - 1, remaining - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if num_vars == 0 {
        out.push(Monomial(Vec::new()));
        return out;
    }
    for d in (0..=max_degree).rev() {
        rec(&mut Vec::with_capacity(num_vars), num_vars, d, &mut out);
    }
    out
}

/// Sparse multivariate polynomial in `x, y, z_1, …, z_k` (variable indices
/// `0, 1, 2, …`). Zero coefficients are never stored, so structural equality
/// is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: FieldSpec,
    num_vars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(field: FieldSpec, num_vars: usize) -> Self {
        MultiPoly {
            field,
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldSpec, num_vars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(field, num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn one(field: FieldSpec, num_vars: usize) -> Self {
        Self::constant(field, num_vars, Scalar::one(field))
    }

    /// The variable with index `var`.
    pub fn var(field: FieldSpec, num_vars: usize, var: usize) -> Self {
        assert!(var < num_vars, "variable index {var} out of range");
        let mut e = vec![0; num_vars];
        e[var] = 1;
        let mut p = Self::zero(field, num_vars);
        p.terms.insert(Monomial(e), Scalar::one(field));
        p
    }

    pub fn from_terms<I>(field: FieldSpec, num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = Self::zero(field, num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::ArityMismatch {
                    expected: num_vars,
                    got: e.len(),
                });
            }
            field.check_same(&c.field())?;
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of jet variables, `num_vars - 2`.
    pub fn jet_order(&self) -> usize {
        self.num_vars.saturating_sub(2)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Degree in one variable; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// True when no term involves a variable with index `>= n`.
    pub fn uses_only_first(&self, n: usize) -> bool {
        self.terms.keys().all(|m| m.0[n.min(self.num_vars)..].iter().all(|&e| e == 0))
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        self.field.check_same(&other.field)?;
        if self.num_vars != other.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.field, self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = Self::zero(self.field, self.num_vars);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.num_vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative; exponents multiply coefficients in the field,
    /// so `∂/∂x x^p = 0` over 𝔽_p.
    pub fn partial_derivative(&self, var: usize) -> Result<MultiPoly> {
        if var >= self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: var + 1,
            });
        }
        let mut out = Self::zero(self.field, self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c.mul_int(e as u64));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        for v in point {
            self.field.check_same(&v.field())?;
        }
        let mut powers: Vec<Vec<Scalar>> = Vec::with_capacity(self.num_vars);
        for (i, v) in point.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut row = Vec::with_capacity(d + 1);
            row.push(Scalar::one(self.field));
            for j in 1..=d {
                row.push(&row[j - 1] * v);
            }
            powers.push(row);
        }
        let mut acc = Scalar::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Composes with one univariate polynomial per variable.
    pub fn substitute_univariate(&self, assignments: &[UniPoly]) -> Result<UniPoly> {
        if assignments.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: assignments.len(),
            });
        }
        for a in assignments {
            self.field.check_same(&a.field())?;
        }
        let mut powers: Vec<Vec<UniPoly>> = Vec::with_capacity(self.num_vars);
        for (i, a) in assignments.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut row = vec![UniPoly::one(self.field)];
            for j in 1..=d {
                row.push(&row[j - 1] * a);
            }
            powers.push(row);
        }
        let mut acc = UniPoly::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = UniPoly::constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes a polynomial (in a common variable set) for each variable.
    pub fn compose(&self, assignments: &[MultiPoly]) -> Result<MultiPoly> {
        if assignments.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: assignments.len(),
            });
        }
        let target_vars = assignments.first().map_or(self.num_vars, |a| a.num_vars);
        for a in assignments {
            self.field.check_same(&a.field)?;
            if a.num_vars != target_vars {
                return Err(Error::ArityMismatch {
                    expected: target_vars,
                    got: a.num_vars,
                });
            }
        }
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(self.num_vars);
        for (i, a) in assignments.iter().enumerate() {
            let d = self.degree_in(i) as usize;
            let mut row = vec![MultiPoly::one(self.field, target_vars)];
            for j in 1..=d {
                row.push(&row[j - 1] * a);
            }
            powers.push(row);
        }
        let mut acc = MultiPoly::zero(self.field, target_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.field, target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Re-embeds into `n` variables. Shrinking fails if a dropped variable occurs.
    pub fn with_num_vars(&self, n: usize) -> Result<MultiPoly> {
        if n < self.num_vars && !self.uses_only_first(n) {
            return Err(Error::ArityMismatch {
                expected: n,
                got: self.num_vars,
            });
        }
        let mut out = Self::zero(self.field, n);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(n, 0);
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Divides by the leading coefficient so scalar multiples compare equal.
    pub fn normalized(&self) -> MultiPoly {
        match self.leading_term() {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("nonzero leading coefficient")),
            _ => self.clone(),
        }
    }

    /// Views a polynomial in `x, y` as `Σ c_i(x) y^i`, returning `[c_0, c_1, …]`.
    pub fn coefficients_in_y(&self) -> Result<Vec<UniPoly>> {
        if !self.uses_only_first(2) {
            return Err(Error::Parse("expected a polynomial in x and y only".into()));
        }
        let dy = self.degree_in(1) as usize;
        let mut raw: Vec<Vec<Scalar>> = vec![Vec::new(); dy + 1];
        for (m, c) in &self.terms {
            let (ex, ey) = (m.0[0] as usize, m.0[1] as usize);
            let row = &mut raw[ey];
            if row.len() <= ex {
                row.resize(ex + 1, Scalar::zero(self.field));
            }
            row[ex] = c.clone();
        }
        Ok(raw
            .into_iter()
            .map(|r| UniPoly::from_coeffs(self.field, r))
            .collect())
    }

    /// The univariate polynomial `y ↦ f(x0, y)`.
    pub fn slice_at_x(&self, x0: &Scalar) -> Result<UniPoly> {
        let coeffs = self.coefficients_in_y()?;
        Ok(UniPoly::from_coeffs(
            self.field,
            coeffs.iter().map(|c| c.evaluate(x0)).collect(),
        ))
    }

    /// The polynomial `x ↦ f(x, y0)`.
    pub fn slice_at_y(&self, y0: &Scalar) -> Result<UniPoly> {
        if !self.uses_only_first(2) {
            return Err(Error::Parse("expected a polynomial in x and y only".into()));
        }
        let dx = self.degree_in(0) as usize;
        let mut coeffs = vec![Scalar::zero(self.field); dx + 1];
        for (m, c) in &self.terms {
            let t = c * &y0.pow(m.0[1]);
            let slot = &mut coeffs[m.0[0] as usize];
            *slot = &*slot + &t;
        }
        Ok(UniPoly::from_coeffs(self.field, coeffs))
    }

    /// Builds `Σ c_i(x) y^i` from univariate coefficient polynomials in x.
    pub fn from_y_coefficients(field: FieldSpec, coeffs: &[UniPoly], num_vars: usize) -> MultiPoly {
        let mut out = Self::zero(field, num_vars);
        for (ey, c) in coeffs.iter().enumerate() {
            for (ex, a) in c.coeffs().iter().enumerate() {
                let mut e = vec![0; num_vars];
                e[0] = ex as u32;
                e[1] = ey as u32;
                out.add_term(Monomial(e), a.clone());
            }
        }
        out
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("incompatible polynomials")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("incompatible polynomials")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("incompatible polynomials")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Scalar::one(self.field))
    }
}

pub(crate) fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        j => format!("z{}", j - 1),
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        var_name(i)
                    } else {
                        format!("{}^{e}", var_name(i))
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}
