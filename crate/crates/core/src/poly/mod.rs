//! Sparse multivariate and dense univariate polynomials with exact coefficients.

mod multi;
mod parse;
mod resultant;
pub mod roots;
mod uni;

pub use multi::{monomials_up_to, Monomial, MultiPoly};
pub use parse::parse_poly;
pub use resultant::{bareiss_determinant, resultant_y};
pub use uni::UniPoly;


#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::field::{FieldSpec, Scalar};

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn p(src: &str) -> MultiPoly {
        parse_poly(q(), 2, src).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(p("x + y").checked_add(&p("-x")).unwrap(), p("y"));
        assert_eq!(MultiPoly::zero(q(), 2).checked_add(&p("x^2 - y")).unwrap(), p("x^2 - y"));
        let f5 = FieldSpec::prime(5).unwrap();
        let a = parse_poly(f5, 2, "3x").unwrap();
        let b = parse_poly(f5, 2, "2x").unwrap();
        assert!(a.checked_add(&b).unwrap().is_zero());
        assert!(matches!(a.checked_add(&p("x")), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("x + y").checked_mul(&p("x - y")).unwrap(), p("x^2 - y^2"));
        assert_eq!(p("x*y + 3").checked_mul(&MultiPoly::one(q(), 2)).unwrap(), p("x*y + 3"));
    }

    #[test]
    fn cube_over_f3_matches_naive_expansion() {
        let f3 = FieldSpec::prime(3).unwrap();
        let xp1 = parse_poly(f3, 2, "x + 1").unwrap();
        let cube = xp1.checked_mul(&xp1).unwrap().checked_mul(&xp1).unwrap();
        // Naive oracle: binomial coefficients 1,3,3,1 reduced mod 3 term by term.
        let binom = [1i64, 3, 3, 1];
        let expected = MultiPoly::from_terms(
            f3,
            2,
            binom
                .iter()
                .enumerate()
                .map(|(i, &c)| (vec![i as u32, 0], Scalar::from_i64(f3, c))),
        )
        .unwrap();
        assert_eq!(cube, expected);
        assert_eq!(cube, parse_poly(f3, 2, "x^3 + 1").unwrap());
    }

    #[test]
    fn partial_derivative_examples() {
        assert_eq!(p("x^2 + y^2 - 1").partial_derivative(1).unwrap(), p("2y"));
        assert!(p("y^3").partial_derivative(0).unwrap().is_zero());
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(parse_poly(f3, 2, "x^3").unwrap().partial_derivative(0).unwrap().is_zero());
        assert!(p("x").partial_derivative(2).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let circle = p("x^2 + y^2 - 1");
        let at = |x: i64, y: i64, f: FieldSpec, c: &MultiPoly| {
            c.evaluate(&[Scalar::from_i64(f, x), Scalar::from_i64(f, y)]).unwrap()
        };
        assert!(at(0, 1, q(), &circle).is_zero());
        assert!(at(1, 1, q(), &circle).is_one());
        let f7 = FieldSpec::prime(7).unwrap();
        let c7 = parse_poly(f7, 2, "x^2 + y^2 - 1").unwrap();
        assert!(at(2, 2, f7, &c7).is_zero());
        assert_eq!(
            circle.evaluate(&[Scalar::zero(q())]),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn substitution_examples() {
        let t = UniPoly::x(q());
        let t2 = UniPoly::from_i64s(q(), &[0, 0, 1]);
        assert!(p("y - x^2").substitute_univariate(&[t.clone(), t2.clone()]).unwrap().is_zero());
        let z = parse_poly(q(), 3, "z1").unwrap();
        let two_t = UniPoly::from_i64s(q(), &[0, 2]);
        assert_eq!(z.substitute_univariate(&[t.clone(), t2, two_t.clone()]).unwrap(), two_t);
        let one = UniPoly::one(q());
        assert_eq!(p("x^2 + y^2 - 1").substitute_univariate(&[t, one]).unwrap(), UniPoly::from_i64s(q(), &[0, 0, 1]));
    }

    #[test]
    fn monomial_enumeration_counts() {
        // C(d + n, n) monomials of degree <= d in n variables.
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(4, 13).len(), 2380);
        let m = monomials_up_to(2, 2);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
    }
}
