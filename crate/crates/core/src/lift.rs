//! Jet lifts of plane curves.
//!
//! For a curve `f(x, y) = 0` that is locally a graph `y = h(x)`, the
//! generators `P_j = D^j f` of the total derivative
//! `D = ∂_x + z_1 ∂_y + Σ z_{i+1} ∂_{z_i}` vanish at `(x, h, h', …, h^(k))`.
//! Each `P_j` has the form `z_j·f_y + R_j(x, y, z_1, …, z_{j-1})`, so at a
//! smooth point with `f_y ≠ 0` the jet is obtained by solving one linear
//! equation per order.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{PlaneCurve, PlanePoint};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::{MultiPoly, UniPoly};
use crate::series;

/// `D(Q)` for `Q` in `x, y, z_1, …, z_k` with `k = num_vars - 2`.
///
/// Fails if `Q` involves `z_k`, since `D(z_k) = z_{k+1}` leaves the ring.
pub fn total_derivative(q: &MultiPoly) -> Result<MultiPoly> {
    let n = q.num_vars();
    if n < 2 {
        return Err(Error::ArityMismatch { expected: 2, got: n });
    }
    let k = n - 2;
    if k > 0 && q.degree_in(n - 1) > 0 {
        return Err(Error::ConstraintViolated(format!(
            "total derivative of a polynomial in z{k} needs z{}",
            k + 1
        )));
    }
    let field = q.field();
    let mut out = q.partial_derivative(0)?;
    if k == 0 {
        // only x and y: D(Q) would need z1
        if q.degree_in(1) > 0 {
            return Err(Error::ConstraintViolated("total derivative of a polynomial in y needs z1".into()));
        }
        return Ok(out);
    }
    out = &out + &(&MultiPoly::var(field, n, 2) * &q.partial_derivative(1)?);
    for i in 1..k {
        let dz = q.partial_derivative(i + 1)?;
        if !dz.is_zero() {
            out = &out + &(&MultiPoly::var(field, n, i + 2) * &dz);
        }
    }
    Ok(out)
}

/// `[f, D f, …, D^k f]` embedded in `2 + k` variables, without validation.
fn prolong(f: &MultiPoly, k: usize) -> Result<Vec<MultiPoly>> {
    let mut gens = vec![f.with_num_vars(2 + k)?];
    for _ in 0..k {
        let next = total_derivative(gens.last().expect("nonempty"))?;
        gens.push(next);
    }
    Ok(gens)
}

/// The implicit-differentiation system `[f, P_1, …, P_k]` of a curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSystem {
    curve: PlaneCurve,
    k: usize,
    generators: Vec<MultiPoly>,
    fy: MultiPoly,
}

impl LiftSystem {
    pub fn new(curve: &PlaneCurve, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrder { min: 1, got: k });
        }
        if curve.poly().degree_in(1) == 0 {
            return Err(Error::VerticalLine {
                label: curve.label().to_string(),
            });
        }
        let generators = prolong(curve.poly(), k)?;
        let fy = curve.partial_y().with_num_vars(2 + k)?;
        for (j, p) in generators.iter().enumerate().skip(1) {
            if p.partial_derivative(j + 1)? != fy {
                return Err(Error::Internal(format!("d P_{j} / d z_{j} differs from f_y")));
            }
        }
        Ok(LiftSystem {
            curve: curve.clone(),
            k,
            generators,
            fy,
        })
    }

    pub fn curve(&self) -> &PlaneCurve {
        &self.curve
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    /// True when every generator vanishes at the jet.
    pub fn contains(&self, jet: &Jet) -> Result<bool> {
        let c = jet.coords();
        for g in &self.generators {
            if !g.evaluate(&c)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The jet of order `k` at a smooth non-vertical point, by the sequential
    /// linear solve `z_j = -R_j / f_y`.
    pub fn jet_at(&self, p: &PlanePoint) -> Result<Jet> {
        let fy = check_jet_point(&self.curve, p, self.k)?;
        let inv = fy.inv()?;
        let field = self.curve.field();
        let mut coords = p.coords().to_vec();
        coords.resize(2 + self.k, Scalar::zero(field));
        for j in 1..=self.k {
            // z_j is still zero in coords, so this evaluates R_j
            let r = self.generators[j].evaluate(&coords)?;
            coords[j + 1] = -(&r * &inv);
        }
        Ok(Jet::new(p.clone(), coords.split_off(2)))
    }

    /// `f_y` as a polynomial in the lift variables.
    pub fn fy(&self) -> &MultiPoly {
        &self.fy
    }
}

/// Checks the preconditions shared by both jet routes; returns `f_y(p)`.
fn check_jet_point(curve: &PlaneCurve, p: &PlanePoint, k: usize) -> Result<Scalar> {
    let field = curve.field();
    if !field.factorials_invertible_to(k) {
        return Err(Error::CharacteristicTooSmall {
            characteristic: field.characteristic(),
            required: k,
        });
    }
    let (gx, gy) = curve.gradient_at(p)?;
    if gy.is_zero() {
        let label = curve.label().to_string();
        let point = p.to_string();
        return Err(if gx.is_zero() {
            Error::SingularPoint { label, point }
        } else {
            Error::VerticalTangent { label, point }
        });
    }
    Ok(gy)
}

/// A point `(x, y, z_1, …, z_k)` of the lift.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Jet {
    pub base: PlanePoint,
    pub derivatives: Vec<Scalar>,
}

impl Jet {
    pub fn new(base: PlanePoint, derivatives: Vec<Scalar>) -> Self {
        Jet { base, derivatives }
    }

    pub fn order(&self) -> usize {
        self.derivatives.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.base.x.field()
    }

    /// `[x, y, z_1, …, z_k]`.
    pub fn coords(&self) -> Vec<Scalar> {
        let mut c = Vec::with_capacity(2 + self.derivatives.len());
        c.push(self.base.x.clone());
        c.push(self.base.y.clone());
        c.extend(self.derivatives.iter().cloned());
        c
    }

    /// The jet of lower order `j ≤ k` at the same point.
    pub fn truncated(&self, j: usize) -> Jet {
        Jet::new(self.base.clone(), self.derivatives[..j.min(self.order())].to_vec())
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}", self.base.x, self.base.y)?;
        for z in &self.derivatives {
            write!(f, ", {z}")?;
        }
        write!(f, ")")
    }
}

/// The `k`-jet of a curve at a smooth point with non-vertical tangent.
///
/// Over 𝔽_p this needs `p > k`.
pub fn jet_at(curve: &PlaneCurve, p: &PlanePoint, k: usize) -> Result<Jet> {
    if k == 0 {
        check_jet_point(curve, p, 0)?;
        return Ok(Jet::new(p.clone(), Vec::new()));
    }
    LiftSystem::new(curve, k)?.jet_at(p)
}

/// The same jet by power-series Newton iteration: `z_j = j!·c_j` where
/// `y = y0 + Σ c_j s^j` solves `f(x0 + s, y) ≡ 0 mod s^(k+1)`.
pub fn jet_at_series(curve: &PlaneCurve, p: &PlanePoint, k: usize) -> Result<Jet> {
    check_jet_point(curve, p, k)?;
    let field = curve.field();
    let h = series::implicit_branch(curve.poly(), &p.x, &p.y, k + 1)?;
    let mut fact = Scalar::one(field);
    let mut z = Vec::with_capacity(k);
    for j in 1..=k {
        fact = fact.mul_int(j as u64);
        z.push(&h.coeff(j) * &fact);
    }
    Ok(Jet::new(p.clone(), z))
}

/// `[g, g', …, g^(k)]` for a graph `y = g(x)`.
pub fn graph_derivatives(g: &UniPoly, k: usize) -> Vec<UniPoly> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(g.clone());
    for j in 1..=k {
        let next = out[j - 1].derivative();
        out.push(next);
    }
    out
}

/// Jet of a graph from precomputed derivatives, at abscissa `x`.
pub fn graph_jet(derivs: &[UniPoly], x: &Scalar) -> Jet {
    let y = derivs[0].evaluate(x);
    Jet::new(
        PlanePoint::new(x.clone(), y),
        derivs[1..].iter().map(|d| d.evaluate(x)).collect(),
    )
}

/// `x = 0, 1, -1, 2, -2, …` followed by fractions of growing height.
fn rational_abscissas(field: FieldSpec, max_height: u64) -> impl Iterator<Item = Scalar> {
    (1..=max_height).flat_map(move |h| {
        let mut out = Vec::new();
        if h == 1 {
            out.push(Scalar::zero(field));
        }
        // all a/b in lowest terms with max(|a|, b) = h
        for b in 1..=h {
            for a in 1..=h {
                if a.max(b) != h || num_integer::gcd(a, b) != 1 {
                    continue;
                }
                let v = Scalar::from_i64(field, a as i64)
                    .checked_div(&Scalar::from_i64(field, b as i64))
                    .expect("nonzero denominator");
                out.push(v.clone());
                out.push(-v);
            }
        }
        out
    })
}

/// Heights of rational abscissas tried when sampling a general curve over ℚ.
const RATIONAL_SEARCH_HEIGHT: u64 = 40;

/// `count` distinct jets on the lift of `curve`.
///
/// Graphs are swept at `x = 0, 1, 2, …`. Other curves are scanned point by
/// point (all of 𝔽_p, or rational abscissas of growing height over ℚ),
/// keeping smooth points with non-vertical tangent; `seed` shuffles the
/// points found above a common abscissa.
pub fn sample_lift_points(curve: &PlaneCurve, k: usize, count: usize, seed: u64) -> Result<Vec<Jet>> {
    let field = curve.field();
    if !field.factorials_invertible_to(k) {
        return Err(Error::CharacteristicTooSmall {
            characteristic: field.characteristic(),
            required: k,
        });
    }
    let insufficient = |found: usize| Error::InsufficientPoints {
        label: curve.label().to_string(),
        needed: count,
        found,
    };
    if let Some(g) = curve.graph() {
        let derivs = graph_derivatives(g, k);
        let available = field.modulus().map_or(u64::MAX, |p| p);
        if (count as u64) > available {
            return Err(insufficient(available as usize));
        }
        return Ok((0..count as u64)
            .map(|x| graph_jet(&derivs, &Scalar::from_u64(field, x)))
            .collect());
    }
    let system = if k > 0 { Some(LiftSystem::new(curve, k)?) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let xs: Box<dyn Iterator<Item = Scalar>> = match field.modulus() {
        Some(p) => Box::new((0..p).map(move |v| Scalar::from_u64(field, v))),
        None => Box::new(rational_abscissas(field, RATIONAL_SEARCH_HEIGHT)),
    };
    for x in xs {
        if out.len() >= count {
            break;
        }
        let slice = curve.poly().slice_at_x(&x)?;
        if slice.is_zero() {
            // a vertical line component: every point there has f_y = 0
            continue;
        }
        let mut ys = slice.roots_in_field()?;
        ys.shuffle(&mut rng);
        for y in ys {
            if out.len() >= count {
                break;
            }
            let p = PlanePoint::new(x.clone(), y);
            let jet = match &system {
                Some(s) => s.jet_at(&p),
                None => jet_at(curve, &p, 0),
            };
            match jet {
                Ok(j) => out.push(j),
                Err(Error::SingularPoint { .. } | Error::VerticalTangent { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if out.len() < count {
        return Err(insufficient(out.len()));
    }
    Ok(out)
}

/// An upper bound on the degree of the lift curve, for Bézout certificates.
///
/// Graphs are parameterized by `x` with coordinates of degree at most
/// `deg g`. Other curves use the product of the generator degrees.
pub fn lift_degree_bound(curve: &PlaneCurve, k: usize) -> u64 {
    if let Some(g) = curve.graph() {
        return g.degree().unwrap_or(0).max(1) as u64;
    }
    let gens = prolong(curve.poly(), k).unwrap_or_else(|_| vec![curve.poly().clone(); k + 1]);
    gens.iter()
        .map(|g| g.total_degree().unwrap_or(0).max(1) as u64)
        .fold(1u64, u64::saturating_mul)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn curve(field: FieldSpec, src: &str) -> PlaneCurve {
        PlaneCurve::new(parse_poly(field, 2, src).unwrap(), src).unwrap()
    }

    fn jet_strs(j: &Jet) -> Vec<String> {
        j.coords().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn total_derivative_examples() {
        let f = parse_poly(q(), 4, "x^2 + y^2 - 1").unwrap();
        let p1 = total_derivative(&f).unwrap();
        assert_eq!(p1, parse_poly(q(), 4, "2x + 2y*z1").unwrap());
        assert_eq!(total_derivative(&p1).unwrap(), parse_poly(q(), 4, "2 + 2z1^2 + 2y*z2").unwrap());
        assert!(total_derivative(&parse_poly(q(), 4, "7").unwrap()).unwrap().is_zero());
        assert!(total_derivative(&parse_poly(q(), 4, "z2").unwrap()).is_err());
    }

    #[test]
    fn circle_system() {
        let sys = LiftSystem::new(&curve(q(), "x^2 + y^2 - 1"), 2).unwrap();
        let expected = ["x^2 + y^2 - 1", "2x + 2y*z1", "2 + 2z1^2 + 2y*z2"].map(|s| parse_poly(q(), 4, s).unwrap());
        assert_eq!(sys.generators(), &expected);
    }

    #[test]
    fn graph_system_linearizes() {
        let g = curve(q(), "y - x^3 - 2x");
        let sys = LiftSystem::new(&g, 3).unwrap();
        let expected = ["y - x^3 - 2x", "z1 - 3x^2 - 2", "z2 - 6x", "z3 - 6"].map(|s| parse_poly(q(), 5, s).unwrap());
        assert_eq!(sys.generators(), &expected);
    }

    #[test]
    fn vertical_lines_rejected() {
        assert_eq!(
            LiftSystem::new(&curve(q(), "x"), 1),
            Err(Error::VerticalLine { label: "x".into() })
        );
        assert!(matches!(LiftSystem::new(&curve(q(), "y"), 0), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn jet_examples() {
        let parabola = curve(q(), "y - x^2");
        let j = jet_at(&parabola, &PlanePoint::from_i64(q(), 1, 1), 3).unwrap();
        assert_eq!(jet_strs(&j), ["1", "1", "2", "2", "0"]);
        let circle = curve(q(), "x^2 + y^2 - 1");
        let j = jet_at(&circle, &PlanePoint::from_i64(q(), 0, 1), 2).unwrap();
        assert_eq!(jet_strs(&j), ["0", "1", "0", "-1"]);
        let f5 = FieldSpec::prime(5).unwrap();
        let c5 = curve(f5, "x^2 + y^2 - 1");
        let j = jet_at(&c5, &PlanePoint::from_i64(f5, 0, 1), 2).unwrap();
        assert_eq!(jet_strs(&j), ["0", "1", "0", "4"]);
        assert_eq!(jet_at_series(&c5, &PlanePoint::from_i64(f5, 0, 1), 2).unwrap(), j);
    }

    #[test]
    fn jet_errors() {
        let circle = curve(q(), "x^2 + y^2 - 1");
        assert!(matches!(
            jet_at(&circle, &PlanePoint::from_i64(q(), 1, 0), 1),
            Err(Error::VerticalTangent { .. })
        ));
        assert!(matches!(
            jet_at(&circle, &PlanePoint::from_i64(q(), 2, 0), 1),
            Err(Error::PointNotOnCurve { .. })
        ));
        let cusp = curve(q(), "y^2 - x^3");
        assert!(matches!(
            jet_at(&cusp, &PlanePoint::from_i64(q(), 0, 0), 1),
            Err(Error::SingularPoint { .. })
        ));
        let f3 = FieldSpec::prime(3).unwrap();
        let g3 = curve(f3, "y - x^2");
        assert!(matches!(
            jet_at(&g3, &PlanePoint::from_i64(f3, 0, 0), 3),
            Err(Error::CharacteristicTooSmall { .. })
        ));
    }

    #[test]
    fn sampling_examples() {
        let parabola = curve(q(), "y - x^2");
        let jets = sample_lift_points(&parabola, 1, 3, 0).unwrap();
        let strs: Vec<Vec<String>> = jets.iter().map(jet_strs).collect();
        assert_eq!(strs, [["0", "0", "0"], ["1", "1", "2"], ["2", "4", "4"]]);
        let circle = curve(q(), "x^2 + y^2 - 1");
        let mut jets = sample_lift_points(&circle, 1, 2, 0).unwrap();
        jets.sort();
        let strs: Vec<Vec<String>> = jets.iter().map(jet_strs).collect();
        assert_eq!(strs, [["0", "-1", "0"], ["0", "1", "0"]]);
        let more = sample_lift_points(&circle, 2, 6, 0).unwrap();
        let sys = LiftSystem::new(&circle, 2).unwrap();
        assert!(more.iter().all(|j| sys.contains(j).unwrap()));
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(
            sample_lift_points(&curve(f3, "x^2 + y^2 - 1"), 1, 10, 0),
            Err(Error::InsufficientPoints {
                label: "x^2 + y^2 - 1".into(),
                needed: 10,
                found: 2
            })
        );
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(lift_degree_bound(&curve(q(), "y - x^3"), 4), 3);
        assert_eq!(lift_degree_bound(&curve(q(), "y - x"), 2), 1);
        assert_eq!(lift_degree_bound(&curve(q(), "x^2 + y^2 - 1"), 2), 8);
    }
}
