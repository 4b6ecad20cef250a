//! Plane curves `Z(f) ⊂ F²` with a square-free defining polynomial.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::{resultant_y, MultiPoly, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: Scalar,
    pub y: Scalar,
}

impl PlanePoint {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        PlanePoint { x, y }
    }

    pub fn from_i64(field: FieldSpec, x: i64, y: i64) -> Self {
        PlanePoint {
            x: Scalar::from_i64(field, x),
            y: Scalar::from_i64(field, y),
        }
    }

    pub fn coords(&self) -> [Scalar; 2] {
        [self.x.clone(), self.y.clone()]
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A plane curve with its validated defining polynomial.
///
/// Irreducibility of general input is not checked; callers assert it with
/// [`PlaneCurve::assert_irreducible`]. Graphs `y = g(x)` are irreducible by
/// construction and are recognized structurally whenever the polynomial is
/// `c·y - h(x)` with `c` a nonzero constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    poly: MultiPoly,
    fx: MultiPoly,
    fy: MultiPoly,
    degree: u32,
    label: String,
    irreducible_asserted: bool,
    graph: Option<UniPoly>,
}

impl PlaneCurve {
    /// Validates `f` as a square-free, non-constant polynomial in `x, y`.
    ///
    /// Over 𝔽_p the characteristic must exceed `deg f`; below that a formal
    /// partial can vanish without a repeated factor and the square-free
    /// certificate is unsound.
    pub fn new(f: MultiPoly, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.uses_only_first(2) {
            return Err(Error::NotBivariate { label });
        }
        let f = f.with_num_vars(2)?;
        let degree = f.total_degree().unwrap_or(0);
        if degree == 0 {
            return Err(Error::ConstraintViolated(format!(
                "curve {label}: constant polynomial defines no curve"
            )));
        }
        let field = f.field();
        if !field.factorials_invertible_to(degree as usize) {
            return Err(Error::CharacteristicTooSmall {
                characteristic: field.characteristic(),
                required: degree as usize,
            });
        }
        if !is_square_free(&f)? {
            return Err(Error::NotSquareFree { label });
        }
        let graph = detect_graph(&f)?;
        Ok(PlaneCurve {
            fx: f.partial_derivative(0)?,
            fy: f.partial_derivative(1)?,
            degree,
            irreducible_asserted: graph.is_some(),
            graph,
            poly: f,
            label,
        })
    }

    /// The graph `y = g(x)`, defined by `y - g(x)`.
    pub fn graph_of(g: &UniPoly, label: impl Into<String>) -> Result<Self> {
        let field = g.field();
        let y = UniPoly::one(field);
        let f = MultiPoly::from_y_coefficients(field, &[-g, y], 2);
        Self::new(f, label)
    }

    /// Records the caller's claim that the curve is irreducible.
    pub fn assert_irreducible(mut self) -> Self {
        self.irreducible_asserted = true;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn field(&self) -> FieldSpec {
        self.poly.field()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn irreducible_asserted(&self) -> bool {
        self.irreducible_asserted
    }

    /// `Some(g)` when the curve is the graph `y = g(x)`.
    pub fn graph(&self) -> Option<&UniPoly> {
        self.graph.as_ref()
    }

    pub fn is_vertical_line(&self) -> bool {
        self.poly.degree_in(1) == 0 && self.degree == 1
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        self.poly.evaluate(&p.coords()).is_ok_and(|v| v.is_zero())
    }

    pub fn partial_x(&self) -> &MultiPoly {
        &self.fx
    }

    pub fn partial_y(&self) -> &MultiPoly {
        &self.fy
    }

    fn require_on_curve(&self, p: &PlanePoint) -> Result<()> {
        self.field().check_same(&p.x.field())?;
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve {
                label: self.label.clone(),
                point: p.to_string(),
            })
        }
    }

    /// `(f_x(p), f_y(p))` for a point on the curve.
    pub fn gradient_at(&self, p: &PlanePoint) -> Result<(Scalar, Scalar)> {
        self.require_on_curve(p)?;
        let c = p.coords();
        Ok((self.fx.evaluate(&c)?, self.fy.evaluate(&c)?))
    }

    pub fn is_smooth_at(&self, p: &PlanePoint) -> Result<bool> {
        let (gx, gy) = self.gradient_at(p)?;
        Ok(!(gx.is_zero() && gy.is_zero()))
    }

    /// True iff `f_y(p) = 0` at a smooth point.
    pub fn has_vertical_tangent_at(&self, p: &PlanePoint) -> Result<bool> {
        let (gx, gy) = self.gradient_at(p)?;
        if gx.is_zero() && gy.is_zero() {
            return Err(Error::SingularPoint {
                label: self.label.clone(),
                point: p.to_string(),
            });
        }
        Ok(gy.is_zero())
    }

    /// Base-field points where `f = f_x = f_y = 0`. Over ℚ only rational
    /// singular points are found.
    pub fn singular_points(&self) -> Result<Vec<PlanePoint>> {
        common_zeros(&[&self.poly, &self.fx, &self.fy])
    }

    /// Every point of the curve in 𝔽_p².
    pub fn points_on_curve(&self) -> Result<Vec<PlanePoint>> {
        let field = self.field();
        let Some(p) = field.modulus() else {
            return Err(Error::WrongField(field.to_string()));
        };
        let mut out = Vec::new();
        for xv in 0..p {
            let x = Scalar::from_u64(field, xv);
            let slice = self.poly.slice_at_x(&x)?;
            if slice.is_zero() {
                out.extend((0..p).map(|yv| PlanePoint::new(x.clone(), Scalar::from_u64(field, yv))));
            } else {
                out.extend(slice.roots_in_field()?.into_iter().map(|y| PlanePoint::new(x.clone(), y)));
            }
        }
        Ok(out)
    }

    /// The image under `(x, y) ↦ (x + λy, y)`, i.e. the curve `f(x + λy, y) = 0`.
    pub fn apply_shear(&self, lambda: &Scalar) -> Result<PlaneCurve> {
        let field = self.field();
        field.check_same(&lambda.field())?;
        let x = MultiPoly::var(field, 2, 0);
        let y = MultiPoly::var(field, 2, 1);
        let sheared_x = &x + &y.scale(lambda);
        let g = self.poly.compose(&[sheared_x, y])?;
        let mut out = PlaneCurve::new(g, self.label.clone())?;
        out.irreducible_asserted |= self.irreducible_asserted;
        Ok(out)
    }

    /// The defining polynomial up to scalars, used for distinctness.
    pub fn normalized_poly(&self) -> MultiPoly {
        self.poly.normalized()
    }
}

/// `Some(g)` if `f = c·y - h(x)` with `c` a nonzero constant; then `g = h / c`.
fn detect_graph(f: &MultiPoly) -> Result<Option<UniPoly>> {
    let cy = f.coefficients_in_y()?;
    if cy.len() != 2 || cy[1].degree() != Some(0) {
        return Ok(None);
    }
    let c = cy[1].coeff(0);
    Ok(Some((-&cy[0]).scale(&c.inv()?)))
}

/// gcd of the `y`-coefficients of `f`, as a monic polynomial in `x`.
pub fn content_in_y(f: &MultiPoly) -> Result<UniPoly> {
    let coeffs = f.coefficients_in_y()?;
    let mut g = UniPoly::zero(f.field());
    for c in &coeffs {
        g = g.gcd(c)?;
    }
    Ok(g)
}

/// Square-free test for a bivariate `f` whose degree is below the characteristic.
///
/// A repeated factor of positive `y`-degree is a common factor of `f` and
/// `f_y`, detected by `Res_y(f, f_y) = 0`; a repeated factor in `x` alone
/// shows up as a repeated factor of the `y`-content.
pub fn is_square_free(f: &MultiPoly) -> Result<bool> {
    let content = content_in_y(f)?;
    if content.degree().unwrap_or(0) > 0 && content.gcd(&content.derivative())?.degree().unwrap_or(0) > 0 {
        return Ok(false);
    }
    if f.degree_in(1) >= 2 {
        let fy = f.partial_derivative(1)?;
        if resultant_y(f, &fy)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when `f` and `g` share a factor of positive degree.
pub fn share_component(f: &MultiPoly, g: &MultiPoly) -> Result<bool> {
    let cf = content_in_y(f)?;
    let cg = content_in_y(g)?;
    if cf.gcd(&cg)?.degree().unwrap_or(0) > 0 {
        return Ok(true);
    }
    if f.degree_in(1) >= 1 && g.degree_in(1) >= 1 {
        return Ok(resultant_y(f, g)?.is_zero());
    }
    Ok(false)
}

/// A nonzero polynomial in `x` vanishing at the x-coordinate of every common
/// zero of `a` and `b`, if one can be read off without a shared component.
fn eliminant(a: &MultiPoly, b: &MultiPoly) -> Result<Option<UniPoly>> {
    if a.is_zero() || b.is_zero() {
        return Ok(None);
    }
    let r = if a.degree_in(1) == 0 {
        a.coefficients_in_y()?.swap_remove(0)
    } else if b.degree_in(1) == 0 {
        b.coefficients_in_y()?.swap_remove(0)
    } else {
        resultant_y(a, b)?
    };
    Ok((!r.is_zero()).then_some(r))
}

/// Base-field common zeros of a finite set of polynomials in `x, y`.
///
/// Candidate x-coordinates are every element of 𝔽_p, or over ℚ the rational
/// roots of the first nonzero eliminant among the pairs. For each candidate
/// the y-slices are combined by gcd and their roots collected. Fails if the
/// polynomials share a whole vertical line.
pub fn common_zeros(polys: &[&MultiPoly]) -> Result<Vec<PlanePoint>> {
    let field = polys
        .first()
        .ok_or_else(|| Error::EmptyInput("no polynomials".into()))?
        .field();
    let xs: Vec<Scalar> = match field.modulus() {
        Some(p) => (0..p).map(|v| Scalar::from_u64(field, v)).collect(),
        None => {
            let mut found = None;
            'pairs: for i in 0..polys.len() {
                for j in i + 1..polys.len() {
                    if let Some(e) = eliminant(polys[i], polys[j])? {
                        found = Some(e);
                        break 'pairs;
                    }
                }
            }
            match found {
                Some(e) => e.roots_in_field()?,
                None if polys.len() == 1 => {
                    return Err(Error::Internal("common zeros of a single polynomial are a curve".into()))
                }
                None => return Err(Error::Internal("polynomials share a common component".into())),
            }
        }
    };
    let mut out = Vec::new();
    for x in xs {
        let mut g = UniPoly::zero(field);
        for p in polys {
            g = g.gcd(&p.slice_at_x(&x)?)?;
        }
        if g.is_zero() {
            if field.is_rationals() {
                return Err(Error::Internal(format!("vertical line x = {x} is a common component")));
            }
            // every y is a common zero on this line
            out.extend((0..field.characteristic()).map(|v| PlanePoint::new(x.clone(), Scalar::from_u64(field, v))));
            continue;
        }
        if g.degree() == Some(0) {
            continue;
        }
        out.extend(g.roots_in_field()?.into_iter().map(|y| PlanePoint::new(x.clone(), y)));
    }
    out.sort();
    Ok(out)
}
