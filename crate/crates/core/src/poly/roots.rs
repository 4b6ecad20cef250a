//! Roots lying in the base field.
//!
//! Over 𝔽_p every residue is tried. Over ℚ the rational-root theorem is
//! applied to the primitive integer form of the square-free part: every root
//! `r/s` has `r | a_0` and `s | a_n`, so the candidate set comes from the
//! divisors of the trailing and leading coefficients.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::poly::UniPoly;

pub fn roots_in_field(a: &UniPoly) -> Result<Vec<Scalar>> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let field = a.field();
    match field.modulus() {
        Some(p) => Ok((0..p)
            .map(|v| Scalar::from_u64(field, v))
            .filter(|v| a.evaluate(v).is_zero())
            .collect()),
        None => rational_roots(a),
    }
}

fn rational_roots(a: &UniPoly) -> Result<Vec<Scalar>> {
    let field = a.field();
    let mut roots = Vec::new();
    if a.degree() == Some(0) {
        return Ok(roots);
    }
    let sf = a.square_free_part()?;
    let mut ints = primitive_integer_coeffs(&sf);
    // Strip the root at zero so the trailing coefficient is nonzero.
    if ints[0].is_zero() {
        roots.push(Scalar::zero(field));
        let shift = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        ints.drain(..shift);
    }
    if ints.len() < 2 {
        return Ok(roots);
    }
    let lead = ints.last().unwrap().magnitude().clone();
    let trail = ints[0].magnitude().clone();
    let den_divs = divisors(&lead);
    let num_divs = divisors(&trail);
    let mut found: Vec<BigRational> = Vec::new();
    for s in &den_divs {
        for r in &num_divs {
            if !r.gcd(s).is_one() {
                continue;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                let num = BigInt::from_biguint(sign, r.clone());
                let den = BigInt::from_biguint(Sign::Plus, s.clone());
                if eval_int_poly_is_zero(&ints, &num, &den) {
                    found.push(BigRational::new(num, den));
                }
            }
        }
    }
    found.sort();
    found.dedup();
    roots.extend(found.iter().map(|q| Scalar::from_rational(field, q).expect("rational")));
    roots.sort();
    Ok(roots)
}

/// Clears denominators and removes the content.
fn primitive_integer_coeffs(a: &UniPoly) -> Vec<BigInt> {
    let rats: Vec<BigRational> = a
        .coeffs()
        .iter()
        .map(|c| c.as_rational().expect("rational coefficients").clone())
        .collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &content).collect()
}

/// Tests `Σ c_i (n/d)^i = 0` via the homogenized integer form `Σ c_i n^i d^(deg-i)`.
fn eval_int_poly_is_zero(coeffs: &[BigInt], n: &BigInt, d: &BigInt) -> bool {
    let deg = coeffs.len() - 1;
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    let mut npows = Vec::with_capacity(deg + 1);
    let mut np = BigInt::one();
    for _ in 0..=deg {
        npows.push(np.clone());
        np *= n;
    }
    for i in (0..=deg).rev() {
        acc += &coeffs[i] * &npows[i] * &dpow;
        dpow *= d;
    }
    acc.is_zero()
}

/// All positive divisors of `n > 0`, sorted.
pub fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut divs = vec![BigUint::one()];
    for (prime, mult) in factorize(n) {
        let mut next = Vec::with_capacity(divs.len() * (mult as usize + 1));
        for d in &divs {
            let mut pk = d.clone();
            next.push(pk.clone());
            for _ in 0..mult {
                pk *= &prime;
                next.push(pk.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Prime factorization with multiplicities (trial division, then Pollard rho).
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if n <= &BigUint::one() {
        return out;
    }
    let mut rest = n.clone();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut d = 2u64;
    while d <= 10_000 {
        let bd = BigUint::from(d);
        if &bd * &bd > rest {
            break;
        }
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            push(bd.clone(), &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_rho(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    out.sort();
    out
}

fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 1 << 40 {
            return crate::field::is_prime(small);
        }
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of composite `n` (Brent's variant).
fn pollard_rho(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y, mut g) = (BigUint::from(2u32), BigUint::from(2u32), BigUint::one());
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}
