//! Tangency orders, intersection points and the arrangement count
//! `Σ_p m_k(p)`.
//!
//! Two curves are tangent to order `≥ k` at a common point when both are
//! smooth with non-vertical tangent there and their `k`-jets coincide.
//! `m_k(p)` is the number of curves through `p` that have at least one such
//! partner.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{common_zeros, share_component, PlaneCurve, PlanePoint};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lift::{graph_derivatives, graph_jet, jet_at, Jet, LiftSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TangencyOrder {
    /// Jets agree through this order and differ at the next.
    Order(usize),
    /// Jets agree through the requested cutoff.
    SameToCutoff,
}

impl fmt::Display for TangencyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TangencyOrder::Order(k) => write!(f, "{k}"),
            TangencyOrder::SameToCutoff => write!(f, "same-to-cutoff"),
        }
    }
}

/// The largest `k' ≤ k_max` for which the `k'`-jets of the two curves at `p`
/// agree.
pub fn tangency_order_at(a: &PlaneCurve, b: &PlaneCurve, p: &PlanePoint, k_max: usize) -> Result<TangencyOrder> {
    a.field().check_same(&b.field())?;
    a.field().check_same(&p.x.field())?;
    if a.normalized_poly() == b.normalized_poly() {
        return Err(Error::DuplicateCurve {
            first: a.label().to_string(),
            second: b.label().to_string(),
        });
    }
    if !a.contains(p) || !b.contains(p) {
        return Err(Error::PointNotOnBoth {
            first: a.label().to_string(),
            second: b.label().to_string(),
            point: p.to_string(),
        });
    }
    let ja = jet_at(a, p, k_max)?;
    let jb = jet_at(b, p, k_max)?;
    Ok(
        match ja.derivatives.iter().zip(&jb.derivatives).position(|(u, v)| u != v) {
            Some(i) => TangencyOrder::Order(i),
            None => TangencyOrder::SameToCutoff,
        },
    )
}

/// All base-field points lying on both curves.
pub fn intersection_points(a: &PlaneCurve, b: &PlaneCurve) -> Result<Vec<PlanePoint>> {
    a.field().check_same(&b.field())?;
    if share_component(a.poly(), b.poly())? {
        return Err(Error::CommonComponent {
            first: a.label().to_string(),
            second: b.label().to_string(),
        });
    }
    common_zeros(&[a.poly(), b.poly()])
}

/// A finite family of distinct curves over one field, with a tangency order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    field: FieldSpec,
    k: usize,
    curves: Vec<PlaneCurve>,
}

impl Arrangement {
    pub fn new(field: FieldSpec, k: usize, curves: Vec<PlaneCurve>) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrder { min: 1, got: k });
        }
        let mut labels: HashMap<&str, usize> = HashMap::new();
        let mut polys = HashMap::new();
        for (i, c) in curves.iter().enumerate() {
            field.check_same(&c.field())?;
            if labels.insert(c.label(), i).is_some() {
                return Err(Error::DuplicateLabel(c.label().to_string()));
            }
            if let Some(j) = polys.insert(c.normalized_poly(), i) {
                return Err(Error::DuplicateCurve {
                    first: curves[j].label().to_string(),
                    second: c.label().to_string(),
                });
            }
        }
        Ok(Arrangement { field, k, curves })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn curves(&self) -> &[PlaneCurve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// The same curves with a different tangency order.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrder { min: 1, got: k });
        }
        Ok(Arrangement { k, ..self.clone() })
    }

    /// The sub-arrangement of curves whose index passes `keep`.
    pub fn filter_indexed(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        Arrangement {
            field: self.field,
            k: self.k,
            curves: self
                .curves
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }

    /// The first `n` curves.
    pub fn truncated(&self, n: usize) -> Self {
        self.filter_indexed(|i| i < n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExclusionReason {
    Singular,
    Vertical,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionReason::Singular => "singular",
            ExclusionReason::Vertical => "vertical",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangencyRecord {
    pub point: PlanePoint,
    pub participants: Vec<String>,
    pub excluded: Vec<(String, ExclusionReason)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExclusionSummary {
    pub singular: u64,
    pub vertical: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub field: FieldSpec,
    pub k: usize,
    pub n: usize,
    pub total: u64,
    pub records: Vec<TangencyRecord>,
    /// `n^((k+2)/(k+1))`, approximate.
    pub bound_value: f64,
    pub exclusions_summary: ExclusionSummary,
    /// Over ℚ only rational points are examined.
    pub rational_points_only: bool,
}

impl CountReport {
    /// How many records each curve label participates in.
    pub fn participation_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            for l in &r.participants {
                *out.entry(l.clone()).or_insert(0) += 1;
            }
        }
        out
    }
}

/// `n^((k+2)/(k+1))`.
pub fn reference_bound(n: usize, k: usize) -> f64 {
    (n as f64).powf((k as f64 + 2.0) / (k as f64 + 1.0))
}

/// Local behaviour of one curve at one of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Local {
    Jet(Vec<Scalar>),
    Excluded(ExclusionReason),
}

/// Computes jets of one curve at arbitrary points, reusing its lift system.
enum JetEngine {
    Graph(Vec<crate::poly::UniPoly>),
    General(Box<LiftSystem>),
    /// No lift exists: every smooth point has a vertical tangent.
    VerticalOnly,
}

impl JetEngine {
    fn new(curve: &PlaneCurve, k: usize) -> Result<Self> {
        if let Some(g) = curve.graph() {
            return Ok(JetEngine::Graph(graph_derivatives(g, k)));
        }
        match LiftSystem::new(curve, k) {
            Ok(s) => Ok(JetEngine::General(Box::new(s))),
            Err(Error::VerticalLine { .. }) => Ok(JetEngine::VerticalOnly),
            Err(e) => Err(e),
        }
    }

    fn local(&self, curve: &PlaneCurve, p: &PlanePoint) -> Result<Local> {
        let classify = |e: Error| match e {
            Error::SingularPoint { .. } => Ok(Local::Excluded(ExclusionReason::Singular)),
            Error::VerticalTangent { .. } => Ok(Local::Excluded(ExclusionReason::Vertical)),
            e => Err(e),
        };
        match self {
            JetEngine::Graph(d) => Ok(Local::Jet(graph_jet(d, &p.x).derivatives)),
            JetEngine::General(s) => s.jet_at(p).map(|j| Local::Jet(j.derivatives)).or_else(classify),
            JetEngine::VerticalOnly => {
                if curve.is_smooth_at(p)? {
                    Ok(Local::Excluded(ExclusionReason::Vertical))
                } else {
                    Ok(Local::Excluded(ExclusionReason::Singular))
                }
            }
        }
    }

    /// Every point of the curve over 𝔽_p with its local behaviour.
    fn all_points(&self, curve: &PlaneCurve) -> Result<Vec<(PlanePoint, Local)>> {
        if let JetEngine::Graph(d) = self {
            let field = curve.field();
            let p = field.modulus().expect("prime field");
            return Ok((0..p)
                .map(|x| {
                    let j: Jet = graph_jet(d, &Scalar::from_u64(field, x));
                    (j.base, Local::Jet(j.derivatives))
                })
                .collect());
        }
        curve
            .points_on_curve()?
            .into_iter()
            .map(|pt| {
                let l = self.local(curve, &pt)?;
                Ok((pt, l))
            })
            .collect()
    }
}

/// `Σ_p m_k(p)` over all base-field points, with per-point records.
///
/// Over 𝔽_p every curve's points are enumerated and bucketed by point; over
/// ℚ candidate points are the rational pairwise intersections. At each point
/// the incident curves are grouped by `k`-jet and every group of size at
/// least two contributes its members. Curves that are singular or vertical
/// at a point are excluded there and tallied separately.
pub fn count_tangencies(arr: &Arrangement) -> Result<CountReport> {
    let field = arr.field;
    let k = arr.k;
    for c in &arr.curves {
        if !c.irreducible_asserted() {
            return Err(Error::IrreducibilityNotAsserted {
                label: c.label().to_string(),
            });
        }
    }
    if !field.factorials_invertible_to(k) {
        return Err(Error::CharacteristicTooSmall {
            characteristic: field.characteristic(),
            required: k,
        });
    }
    let engines: Vec<JetEngine> = arr
        .curves
        .par_iter()
        .map(|c| JetEngine::new(c, k))
        .collect::<Result<_>>()?;

    let mut at_point: BTreeMap<PlanePoint, Vec<(usize, Local)>> = BTreeMap::new();
    if field.modulus().is_some() {
        let per_curve: Vec<Vec<(PlanePoint, Local)>> = arr
            .curves
            .par_iter()
            .zip(engines.par_iter())
            .map(|(c, e)| e.all_points(c))
            .collect::<Result<_>>()?;
        for (i, pts) in per_curve.into_iter().enumerate() {
            for (pt, l) in pts {
                at_point.entry(pt).or_default().push((i, l));
            }
        }
        at_point.retain(|_, v| v.len() >= 2);
    } else {
        let n = arr.curves.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let hits: Vec<Vec<PlanePoint>> = pairs
            .par_iter()
            .map(|&(i, j)| intersection_points(&arr.curves[i], &arr.curves[j]))
            .collect::<Result<_>>()?;
        let mut incident: BTreeMap<PlanePoint, Vec<usize>> = BTreeMap::new();
        for (&(i, j), pts) in pairs.iter().zip(hits) {
            for pt in pts {
                let e = incident.entry(pt).or_default();
                e.push(i);
                e.push(j);
            }
        }
        let resolved: Vec<(PlanePoint, Vec<(usize, Local)>)> = incident
            .into_par_iter()
            .map(|(pt, mut idx)| {
                idx.sort_unstable();
                idx.dedup();
                let locals = idx
                    .into_iter()
                    .map(|i| Ok((i, engines[i].local(&arr.curves[i], &pt)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((pt, locals))
            })
            .collect::<Result<_>>()?;
        at_point.extend(resolved);
    }

    let mut records = Vec::new();
    let mut total = 0u64;
    let mut summary = ExclusionSummary::default();
    for (pt, locals) in at_point {
        let mut groups: HashMap<&[Scalar], Vec<usize>> = HashMap::new();
        let mut excluded = Vec::new();
        for (i, l) in &locals {
            match l {
                Local::Jet(z) => groups.entry(z.as_slice()).or_default().push(*i),
                Local::Excluded(r) => {
                    match r {
                        ExclusionReason::Singular => summary.singular += 1,
                        ExclusionReason::Vertical => summary.vertical += 1,
                    }
                    excluded.push((arr.curves[*i].label().to_string(), *r));
                }
            }
        }
        let mut part: Vec<usize> = groups.into_values().filter(|g| g.len() >= 2).flatten().collect();
        if part.is_empty() {
            continue;
        }
        part.sort_unstable();
        total += part.len() as u64;
        records.push(TangencyRecord {
            point: pt,
            participants: part.iter().map(|&i| arr.curves[i].label().to_string()).collect(),
            excluded,
        });
    }
    Ok(CountReport {
        field,
        k,
        n: arr.curves.len(),
        total,
        records,
        bound_value: reference_bound(arr.curves.len(), k),
        exclusions_summary: summary,
        rational_points_only: field.is_rationals(),
    })
}

/// Least-squares fit of `ln y = a + b ln x`; returns `(b, e^a)`.
///
/// Pairs with a non-positive coordinate are skipped; `None` if fewer than
/// two distinct abscissas remain.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let m = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((b, (my - b * mx).exp()))
}

/// How `bound_scan` builds an arrangement of a requested size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArrangementGenerator {
    /// A prefix of the sharp family over `F_p`; with `p = None` the smallest
    /// admissible prime whose family has at least `n` curves.
    SharpTruncation { p: Option<u64> },
    /// Distinct random graphs of degree at most `max_deg`.
    RandomGraphs { max_deg: u32, p: u64 },
    /// Vertical translates `y = g(x) + c` of one random graph; they never meet.
    ParallelTranslates { base_deg: u32, p: u64 },
}

impl ArrangementGenerator {
    pub fn generate(&self, n: usize, k: usize, seed: u64) -> Result<Arrangement> {
        use crate::extremal;
        match *self {
            ArrangementGenerator::SharpTruncation { p } => {
                let p = match p {
                    Some(p) => p,
                    None => extremal::smallest_sharp_prime(n, k)?,
                };
                let spec = extremal::SharpFamilySpec::new(p, k)?;
                if (n as u128) > spec.family_size() {
                    return Err(Error::TooManyCurves {
                        requested: n as u128,
                        available: spec.family_size(),
                    });
                }
                extremal::sharp_family_prefix(&spec, n)
            }
            ArrangementGenerator::RandomGraphs { max_deg, p } => {
                extremal::random_graph_arrangement(n, max_deg, p, k, seed)
            }
            ArrangementGenerator::ParallelTranslates { base_deg, p } => {
                extremal::parallel_translates(n, base_deg, p, k, seed)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub total: u64,
    /// `n^((k+2)/(k+1))`, approximate.
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundScan {
    pub generator: ArrangementGenerator,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<BoundRow>,
    /// Least-squares exponent of `total` against `n` over rows with `total > 0`.
    pub fitted_exponent: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub reference_exponent: f64,
}

/// Counts tangencies for a sequence of arrangement sizes.
pub fn bound_scan(generator: &ArrangementGenerator, n_values: &[usize], k: usize, seed: u64) -> Result<BoundScan> {
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let arr = generator.generate(n, k, seed)?;
        let report = count_tangencies(&arr)?;
        let reference = reference_bound(n, k);
        rows.push(BoundRow {
            n,
            total: report.total,
            reference,
            ratio: if reference > 0.0 { report.total as f64 / reference } else { 0.0 },
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.total as f64)).collect();
    let fit = fit_power_law(&pts);
    Ok(BoundScan {
        generator: generator.clone(),
        k,
        seed,
        rows,
        fitted_exponent: fit.map(|f| f.0),
        fitted_constant: fit.map(|f| f.1),
        reference_exponent: (k as f64 + 2.0) / (k as f64 + 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, UniPoly};

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn curve(field: FieldSpec, src: &str) -> PlaneCurve {
        PlaneCurve::new(parse_poly(field, 2, src).unwrap(), src).unwrap()
    }

    fn origin() -> PlanePoint {
        PlanePoint::from_i64(q(), 0, 0)
    }

    #[test]
    fn order_examples() {
        let a = curve(q(), "y - x^2");
        let b = curve(q(), "y - x^2 - x^3");
        assert_eq!(tangency_order_at(&a, &b, &origin(), 5).unwrap(), TangencyOrder::Order(2));
        let c = curve(q(), "y - 2x^2");
        assert_eq!(tangency_order_at(&a, &c, &origin(), 5).unwrap(), TangencyOrder::Order(1));
        let circle = curve(q(), "x^2 + y^2 - 1");
        let line = curve(q(), "y - 1");
        let top = PlanePoint::from_i64(q(), 0, 1);
        assert_eq!(tangency_order_at(&circle, &line, &top, 3).unwrap(), TangencyOrder::Order(1));
        let d = curve(q(), "y - x^2 - x^4");
        assert_eq!(tangency_order_at(&a, &d, &origin(), 2).unwrap(), TangencyOrder::SameToCutoff);
    }

    #[test]
    fn order_errors() {
        let a = curve(q(), "y - x^2");
        let b = curve(q(), "y - 1");
        assert!(matches!(
            tangency_order_at(&a, &b, &origin(), 2),
            Err(Error::PointNotOnBoth { .. })
        ));
        let a2 = curve(q(), "2y - 2x^2");
        assert!(matches!(
            tangency_order_at(&a, &a2, &origin(), 2),
            Err(Error::DuplicateCurve { .. })
        ));
    }

    #[test]
    fn intersection_examples() {
        let pts = intersection_points(&curve(q(), "y - x^2"), &curve(q(), "y - x")).unwrap();
        assert_eq!(pts, vec![PlanePoint::from_i64(q(), 0, 0), PlanePoint::from_i64(q(), 1, 1)]);
        let pts = intersection_points(&curve(q(), "x^2 + y^2 - 1"), &curve(q(), "y - 1")).unwrap();
        assert_eq!(pts, vec![PlanePoint::from_i64(q(), 0, 1)]);
        assert!(intersection_points(&curve(q(), "y - x^2"), &curve(q(), "y - x^2 - 1"))
            .unwrap()
            .is_empty());
        let pts = intersection_points(&curve(q(), "x - 2"), &curve(q(), "y - x^2")).unwrap();
        assert_eq!(pts, vec![PlanePoint::from_i64(q(), 2, 4)]);
        assert!(matches!(
            intersection_points(&curve(q(), "x*(y - 1)"), &curve(q(), "x*(y - 2)")),
            Err(Error::CommonComponent { .. })
        ));
    }

    fn graphs(field: FieldSpec, k: usize, gs: &[&[i64]]) -> Arrangement {
        let curves = gs
            .iter()
            .enumerate()
            .map(|(i, g)| PlaneCurve::graph_of(&UniPoly::from_i64s(field, g), format!("g{i}")).unwrap())
            .collect();
        Arrangement::new(field, k, curves).unwrap()
    }

    #[test]
    fn count_examples() {
        let three = graphs(q(), 2, &[&[0, 0, 1], &[0, 0, 1, 1], &[0, 0, 1, 0, 1]]);
        let r = count_tangencies(&three).unwrap();
        assert_eq!(r.total, 3);
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].point, origin());
        let two = graphs(q(), 2, &[&[0, 0, 1], &[0, 0, 2]]);
        assert_eq!(count_tangencies(&two).unwrap().total, 0);
        assert_eq!(count_tangencies(&two.with_k(1).unwrap()).unwrap().total, 2);
    }

    #[test]
    fn count_over_prime_field_with_exclusions() {
        let f7 = FieldSpec::prime(7).unwrap();
        // the circle meets y = 1 tangentially at (0, 1) and y = x + 1 there transversally
        let curves = vec![
            curve(f7, "x^2 + y^2 - 1").assert_irreducible(),
            curve(f7, "y - 1"),
            curve(f7, "y - x - 1"),
            curve(f7, "x - 1").assert_irreducible(),
        ];
        let arr = Arrangement::new(f7, 1, curves).unwrap();
        let r = count_tangencies(&arr).unwrap();
        assert_eq!(r.total, 2);
        assert_eq!(r.records[0].participants, ["x^2 + y^2 - 1", "y - 1"]);
        // (1, 0) lies on the circle (vertical there) and on x = 1 (vertical everywhere)
        assert!(r.exclusions_summary.vertical >= 2);
    }

    #[test]
    fn unasserted_irreducibility_is_rejected() {
        let arr = Arrangement::new(q(), 1, vec![curve(q(), "y^2 - x^2"), curve(q(), "y")]).unwrap();
        assert!(matches!(count_tangencies(&arr), Err(Error::IrreducibilityNotAsserted { .. })));
    }

    #[test]
    fn arrangement_validation() {
        let a = curve(q(), "y - x");
        assert!(matches!(
            Arrangement::new(q(), 1, vec![a.clone(), a.clone()]),
            Err(Error::DuplicateLabel(_))
        ));
        let b = curve(q(), "2y - 2x").with_label("other");
        assert!(matches!(Arrangement::new(q(), 1, vec![a, b]), Err(Error::DuplicateCurve { .. })));
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let pts: Vec<(f64, f64)> = (1..20).map(|n| (n as f64, 3.0 * (n as f64).powf(1.5))).collect();
        let (b, c) = fit_power_law(&pts).unwrap();
        assert!((b - 1.5).abs() < 1e-9);
        assert!((c - 3.0).abs() < 1e-9);
        assert!(fit_power_law(&[(1.0, 0.0), (2.0, 0.0)]).is_none());
    }
}
