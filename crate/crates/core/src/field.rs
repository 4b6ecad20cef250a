//! Exact scalars: arbitrary-precision rationals and residues modulo a prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Moduli must stay below this bound so residue products fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// The base field: either ℚ or 𝔽_p for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    modulus: Option<u64>,
}

impl FieldSpec {
    pub const fn rationals() -> Self {
        FieldSpec { modulus: None }
    }

    /// A prime field. The modulus is verified prime by trial division.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(FieldSpec { modulus: Some(p) })
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn is_rationals(&self) -> bool {
        self.modulus.is_none()
    }

    /// 0 for ℚ, `p` for 𝔽_p.
    pub fn characteristic(&self) -> u64 {
        self.modulus.unwrap_or(0)
    }

    /// True when `n!` is invertible, i.e. the characteristic is 0 or exceeds `n`.
    pub fn factorials_invertible_to(&self, n: usize) -> bool {
        match self.modulus {
            None => true,
            Some(p) => p > n as u64,
        }
    }

    pub fn check_same(&self, other: &FieldSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modulus {
            None => write!(f, "Q"),
            Some(p) => write!(f, "F_{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Q(BigRational),
    Fp { value: u64, p: u64 },
}

/// An exact field element tagged with its field.
///
/// Rationals are kept in lowest terms with positive denominator; residues
/// are kept in `[0, p)`. Arithmetic between scalars of different fields is
/// a logic error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn zero(field: FieldSpec) -> Self {
        Self::from_i64(field, 0)
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: FieldSpec, v: i64) -> Self {
        match field.modulus {
            None => Scalar(Repr::Q(BigRational::from_integer(BigInt::from(v)))),
            Some(p) => Scalar(Repr::Fp {
                value: v.rem_euclid(p as i64) as u64,
                p,
            }),
        }
    }

    pub fn from_u64(field: FieldSpec, v: u64) -> Self {
        match field.modulus {
            None => Scalar(Repr::Q(BigRational::from_integer(BigInt::from(v)))),
            Some(p) => Scalar(Repr::Fp { value: v % p, p }),
        }
    }

    pub fn from_bigint(field: FieldSpec, v: &BigInt) -> Self {
        match field.modulus {
            None => Scalar(Repr::Q(BigRational::from_integer(v.clone()))),
            Some(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar(Repr::Fp {
                    value: r.to_u64().expect("residue fits in u64"),
                    p,
                })
            }
        }
    }

    /// Maps a rational into the field; over 𝔽_p the denominator must be a unit.
    pub fn from_rational(field: FieldSpec, v: &BigRational) -> Result<Self> {
        match field.modulus {
            None => Ok(Scalar(Repr::Q(v.clone()))),
            Some(_) => {
                let num = Self::from_bigint(field, v.numer());
                let den = Self::from_bigint(field, v.denom());
                num.checked_div(&den)
            }
        }
    }

    /// Parses `"-3"`, `"7/4"` and similar decimal forms.
    pub fn parse(field: FieldSpec, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid scalar literal {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Self::from_rational(field, &BigRational::new(n, d)).map_err(|_| bad())
    }

    pub fn field(&self) -> FieldSpec {
        match &self.0 {
            Repr::Q(_) => FieldSpec::rationals(),
            Repr::Fp { p, .. } => FieldSpec { modulus: Some(*p) },
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Q(q) => q.is_zero(),
            Repr::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Q(q) => q.is_one(),
            Repr::Fp { value, .. } => *value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Q(q) => Some(q),
            Repr::Fp { .. } => None,
        }
    }

    pub fn residue(&self) -> Option<u64> {
        match &self.0 {
            Repr::Q(_) => None,
            Repr::Fp { value, .. } => Some(*value),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Q(q) => Scalar(Repr::Q(q.recip())),
            Repr::Fp { value, p } => Scalar(Repr::Fp {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            }),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `n·self` for a small integer `n`.
    pub fn mul_int(&self, n: u64) -> Self {
        self * &Scalar::from_u64(self.field(), n)
    }

    /// Approximate magnitude for reporting; residues map to their representative.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Q(q) => q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN),
            Repr::Fp { value, .. } => *value as f64,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(&self.0, Repr::Q(q) if q.is_negative())
    }
}

impl Ord for Scalar {
    /// Rationals by value, residues by representative; fields never mix in practice.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.0, &other.0) {
            (Repr::Q(a), Repr::Q(b)) => a.cmp(b),
            (Repr::Fp { value: a, p }, Repr::Fp { value: b, p: q }) => (p, a).cmp(&(q, b)),
            (Repr::Q(_), Repr::Fp { .. }) => std::cmp::Ordering::Less,
            (Repr::Fp { .. }, Repr::Q(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a + b)),
            (Repr::Fp { value: a, p }, Repr::Fp { value: b, p: q }) if p == q => {
                let s = a + b;
                Scalar(Repr::Fp {
                    value: if s >= *p { s - p } else { s },
                    p: *p,
                })
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a - b)),
            (Repr::Fp { value: a, p }, Repr::Fp { value: b, p: q }) if p == q => Scalar(Repr::Fp {
                value: if a >= b { a - b } else { a + p - b },
                p: *p,
            }),
            _ => mismatch(self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a * b)),
            (Repr::Fp { value: a, p }, Repr::Fp { value: b, p: q }) if p == q => Scalar(Repr::Fp {
                value: a * b % p,
                p: *p,
            }),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Q(a) => Scalar(Repr::Q(-a)),
            Repr::Fp { value, p } => Scalar(Repr::Fp {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            }),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}
