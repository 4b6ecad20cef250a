//! Minimal-degree polynomials vanishing on jet lifts, and the descent through
//! the jet variables.
//!
//! A polynomial `P` of degree `d` restricted to the lift of `γ` is a
//! polynomial of degree at most `B·d` along it, where `B` bounds the lift
//! degree. Vanishing at `B·d + 1` distinct lift points therefore forces
//! vanishing on the whole lift, which turns "vanishes on these lifts" into a
//! finite linear system in the coefficients of `P`.

use serde::Serialize;

use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lift::{graph_derivatives, lift_degree_bound, sample_lift_points, Jet};
use crate::linalg::{nullspace, nullspace_fp, normalize_first_nonzero};
use crate::poly::{monomials_up_to, Monomial, MultiPoly, UniPoly};
use crate::tangency::{count_tangencies, Arrangement};

/// Degree at which the search gives up; the parameter count guarantees a
/// kernel long before this for any desk-scale input.
const MAX_FIT_DEGREE: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    /// Exact restriction of `P` to the parameterized lift of a graph.
    Restriction,
    /// Vanishing at `B·deg P + 1` distinct lift points.
    Samples,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveCertificate {
    pub label: String,
    pub contained: bool,
    pub method: CertificateMethod,
    pub samples_tested: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FitResult {
    pub polynomial: MultiPoly,
    pub degree: u32,
    pub k: usize,
    pub constraints_used: usize,
    pub unknowns: usize,
    pub kernel_dimension: usize,
    /// True when the returned polynomial does not involve `z_k`.
    pub top_variable_free: bool,
    /// The degree `d - 1` system was solved and has only the zero solution.
    pub minimality_certified: bool,
    pub per_curve_certificates: Vec<CurveCertificate>,
}

fn check_family(curves: &[PlaneCurve]) -> Result<FieldSpec> {
    let first = curves.first().ok_or_else(|| Error::EmptyInput("no curves to fit".into()))?;
    let field = first.field();
    for c in curves {
        field.check_same(&c.field())?;
    }
    Ok(field)
}

fn lift_samples(curve: &PlaneCurve, k: usize, count: usize) -> Result<Vec<Jet>> {
    sample_lift_points(curve, k, count, 0).map_err(|e| match e {
        Error::InsufficientPoints { label, needed, found } => Error::InsufficientFieldPoints {
            field: curve.field().to_string(),
            label,
            needed,
            found,
        },
        e => e,
    })
}

/// Row of monomial values at one point.
fn monomial_row(monos: &[Monomial], point: &[Scalar], max_degree: u32) -> Vec<Scalar> {
    let field = point[0].field();
    let powers: Vec<Vec<Scalar>> = point
        .iter()
        .map(|v| {
            let mut row = vec![Scalar::one(field)];
            for e in 1..=max_degree as usize {
                row.push(&row[e - 1] * v);
            }
            row
        })
        .collect();
    monos
        .iter()
        .map(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .fold(Scalar::one(field), |acc, (i, &e)| if e == 0 { acc } else { &acc * &powers[i][e as usize] })
        })
        .collect()
}

/// Same row as residues, without allocating scalars per entry.
fn monomial_row_fp(monos: &[Monomial], point: &[u64], max_degree: u32, p: u64) -> Vec<u64> {
    let powers: Vec<Vec<u64>> = point
        .iter()
        .map(|&v| {
            let mut row = vec![1u64];
            for e in 1..=max_degree as usize {
                row.push(row[e - 1] * v % p);
            }
            row
        })
        .collect();
    monos
        .iter()
        .map(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .fold(1u64, |acc, (i, &e)| if e == 0 { acc } else { acc * powers[i][e as usize] % p })
        })
        .collect()
}

/// Kernel of the evaluation matrix restricted to the given columns, as
/// full-length vectors over `field`.
fn kernel_on_columns(field: FieldSpec, points: &[Vec<Scalar>], monos: &[Monomial], cols: &[usize], d: u32) -> Result<Vec<Vec<Scalar>>> {
    let sub: Vec<Monomial> = cols.iter().map(|&c| monos[c].clone()).collect();
    let basis: Vec<Vec<Scalar>> = match field.modulus() {
        Some(p) => {
            let rows: Vec<Vec<u64>> = points
                .iter()
                .map(|pt| {
                    let r: Vec<u64> = pt.iter().map(|s| s.residue().expect("prime field")).collect();
                    monomial_row_fp(&sub, &r, d, p)
                })
                .collect();
            nullspace_fp(rows, sub.len(), p)
                .into_iter()
                .map(|v| v.into_iter().map(|x| Scalar::from_u64(field, x)).collect())
                .collect()
        }
        None => {
            let rows: Vec<Vec<Scalar>> = points.iter().map(|pt| monomial_row(&sub, pt, d)).collect();
            nullspace(field, &rows, sub.len())?
        }
    };
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut full = vec![Scalar::zero(field); monos.len()];
            for (val, &c) in v.into_iter().zip(cols) {
                full[c] = val;
            }
            full
        })
        .collect())
}

fn poly_from_vector(field: FieldSpec, num_vars: usize, monos: &[Monomial], v: &[Scalar]) -> Result<MultiPoly> {
    MultiPoly::from_terms(
        field,
        num_vars,
        monos.iter().zip(v).map(|(m, c)| (m.exponents().to_vec(), c.clone())),
    )
}

/// A nonzero polynomial in `x, y, z_1, …, z_k` of least total degree
/// vanishing on the lift of every curve.
///
/// For `d = 1, 2, …` each curve contributes `B·d + 1` lift points and the
/// first `d` with a nontrivial kernel is returned. Columns are monomials in
/// descending graded-lex order and the kernel vector is the one attached to
/// the first free column, scaled so its leading coefficient is 1. When the
/// kernel contains vectors free of `z_k` the same choice is made among those.
pub fn min_degree_vanishing(curves: &[PlaneCurve], k: usize) -> Result<FitResult> {
    let field = check_family(curves)?;
    let nv = 2 + k;
    let bounds: Vec<u64> = curves.iter().map(|c| lift_degree_bound(c, k)).collect();
    let mut previous_trivial = true;
    for d in 1..=MAX_FIT_DEGREE {
        let mut points: Vec<Vec<Scalar>> = Vec::new();
        for (c, &b) in curves.iter().zip(&bounds) {
            let needed = (b * d as u64 + 1) as usize;
            points.extend(lift_samples(c, k, needed)?.iter().map(Jet::coords));
        }
        let monos = monomials_up_to(nv, d);
        let all: Vec<usize> = (0..monos.len()).collect();
        let kernel = kernel_on_columns(field, &points, &monos, &all, d)?;
        if kernel.is_empty() {
            previous_trivial = true;
            continue;
        }
        let mut chosen = None;
        if k >= 1 {
            let free_cols: Vec<usize> = (0..monos.len()).filter(|&c| monos[c].exponents()[nv - 1] == 0).collect();
            chosen = kernel_on_columns(field, &points, &monos, &free_cols, d)?.into_iter().next();
        }
        let top_free = chosen.is_some() || k == 0;
        let v = normalize_first_nonzero(&chosen.unwrap_or_else(|| kernel[0].clone()));
        let polynomial = poly_from_vector(field, nv, &monos, &v)?;
        let top_variable_free = top_free || polynomial.degree_in(nv - 1) == 0;
        let per_curve_certificates = curves
            .iter()
            .map(|c| certify(&polynomial, c, k))
            .collect::<Result<Vec<_>>>()?;
        return Ok(FitResult {
            degree: polynomial.total_degree().unwrap_or(0),
            polynomial,
            k,
            constraints_used: points.len(),
            unknowns: monos.len(),
            kernel_dimension: kernel.len(),
            top_variable_free,
            minimality_certified: previous_trivial,
            per_curve_certificates,
        });
    }
    Err(Error::Internal(format!("no vanishing polynomial up to degree {MAX_FIT_DEGREE}")))
}

/// The parameter-counting degree cap: the first `d` with more monomials of
/// degree `≤ d` in `2 + k` variables than sample constraints.
pub fn parameter_count_bound(curves: &[PlaneCurve], k: usize) -> u32 {
    let bounds: Vec<u64> = curves.iter().map(|c| lift_degree_bound(c, k)).collect();
    (1..)
        .find(|&d: &u32| {
            let constraints: u64 = bounds.iter().map(|b| b * d as u64 + 1).sum();
            binomial(d as u64 + k as u64 + 2, k as u64 + 2) > constraints as u128
        })
        .expect("monomial count outgrows any linear budget")
}

pub fn binomial(n: u64, r: u64) -> u128 {
    let r = r.min(n.saturating_sub(r));
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn certify(poly: &MultiPoly, curve: &PlaneCurve, k: usize) -> Result<CurveCertificate> {
    let (contained, method, samples_tested) = containment(poly, curve, k)?;
    Ok(CurveCertificate {
        label: curve.label().to_string(),
        contained,
        method,
        samples_tested,
    })
}

fn containment(poly: &MultiPoly, curve: &PlaneCurve, k: usize) -> Result<(bool, CertificateMethod, usize)> {
    if poly.num_vars() != 2 + k {
        return Err(Error::ArityMismatch {
            expected: 2 + k,
            got: poly.num_vars(),
        });
    }
    poly.field().check_same(&curve.field())?;
    if let Some(g) = curve.graph() {
        let mut subs = vec![UniPoly::x(curve.field())];
        subs.extend(graph_derivatives(g, k));
        let restricted = poly.substitute_univariate(&subs)?;
        return Ok((restricted.is_zero(), CertificateMethod::Restriction, 0));
    }
    if poly.is_zero() {
        return Ok((true, CertificateMethod::Samples, 0));
    }
    let n = (lift_degree_bound(curve, k) * poly.total_degree().unwrap_or(0) as u64 + 1) as usize;
    let jets = lift_samples(curve, k, n)?;
    for j in &jets {
        if !poly.evaluate(&j.coords())?.is_zero() {
            return Ok((false, CertificateMethod::Samples, n));
        }
    }
    Ok((true, CertificateMethod::Samples, n))
}

/// Whether `P` vanishes on the whole lift of `curve` of order `k`.
///
/// Graphs are tested exactly by restricting to the parameterization
/// `(t, g, g', …, g^(k))`. Other curves use the Bézout certificate with
/// [`lift_degree_bound`].
pub fn contains_lift(poly: &MultiPoly, curve: &PlaneCurve, k: usize) -> Result<bool> {
    containment(poly, curve, k).map(|c| c.0)
}

/// `∂P/∂z_k` for `P` in `x, y, z_1, …, z_k`.
pub fn dz_top(poly: &MultiPoly, k: usize) -> Result<MultiPoly> {
    if k < 1 {
        return Err(Error::InvalidOrder { min: 1, got: k });
    }
    if poly.num_vars() != 2 + k {
        return Err(Error::ArityMismatch {
            expected: 2 + k,
            got: poly.num_vars(),
        });
    }
    poly.partial_derivative(k + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CascadeStep {
    pub level: usize,
    pub fit: FitResult,
    /// `∂P/∂z_level`; absent at level 0.
    pub dz_top: Option<MultiPoly>,
    pub dz_top_is_zero: Option<bool>,
    /// Whether every lift of this level lies in the zero set of `dz_top`.
    pub lifts_in_dz_top_zero_set: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CascadeStatus {
    Complete,
    DescentStopped { level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CascadeTrace {
    pub k: usize,
    pub steps: Vec<CascadeStep>,
    pub status: CascadeStatus,
    /// The bivariate polynomial reached when the descent completes.
    pub p0: Option<MultiPoly>,
    pub p0_degree: Option<u32>,
    pub p0_vanishes_on_all: Option<bool>,
    pub sum_curve_degrees: u64,
    /// `Σ deg γ ≤ deg P_0`, the consistency check for distinct irreducible curves.
    pub degree_consistent: Option<bool>,
    /// Tangency points of order `≥ k` per curve, when the family can be counted.
    pub rich_curves: Vec<(String, usize)>,
}

/// Fits `P_k`, then descends one jet variable at a time while the fitted
/// polynomial is free of the top variable and the lifts lie in the zero set
/// of its top derivative.
pub fn cascade(curves: &[PlaneCurve], k: usize) -> Result<CascadeTrace> {
    let field = check_family(curves)?;
    let mut steps = Vec::new();
    let mut level = k;
    let mut fit = min_degree_vanishing(curves, k)?;
    let status = loop {
        if level == 0 {
            steps.push(CascadeStep {
                level,
                fit: fit.clone(),
                dz_top: None,
                dz_top_is_zero: None,
                lifts_in_dz_top_zero_set: None,
            });
            break CascadeStatus::Complete;
        }
        let q = dz_top(&fit.polynomial, level)?;
        let mut inside = true;
        for c in curves {
            if !contains_lift(&q, c, level)? {
                inside = false;
                break;
            }
        }
        let q_zero = q.is_zero();
        steps.push(CascadeStep {
            level,
            fit: fit.clone(),
            dz_top: Some(q),
            dz_top_is_zero: Some(q_zero),
            lifts_in_dz_top_zero_set: Some(inside),
        });
        if !(inside && q_zero) {
            break CascadeStatus::DescentStopped { level };
        }
        level -= 1;
        fit = min_degree_vanishing(curves, level)?;
    };
    let sum_curve_degrees: u64 = curves.iter().map(|c| c.degree() as u64).sum();
    let (p0, p0_degree, p0_vanishes_on_all, degree_consistent) = match status {
        CascadeStatus::Complete => {
            let p0 = fit.polynomial.clone();
            let deg = p0.total_degree().unwrap_or(0);
            let all = fit.per_curve_certificates.iter().all(|c| c.contained);
            (Some(p0), Some(deg), Some(all), Some(sum_curve_degrees <= deg as u64))
        }
        CascadeStatus::DescentStopped { .. } => (None, None, None, None),
    };
    let rich_curves = match Arrangement::new(field, k.max(1), curves.to_vec()).and_then(|a| count_tangencies(&a)) {
        Ok(r) => {
            let counts = r.participation_counts();
            curves
                .iter()
                .map(|c| (c.label().to_string(), counts.get(c.label()).copied().unwrap_or(0)))
                .collect()
        }
        Err(_) => Vec::new(),
    };
    Ok(CascadeTrace {
        k,
        steps,
        status,
        p0,
        p0_degree,
        p0_vanishes_on_all,
        sum_curve_degrees,
        degree_consistent,
        rich_curves,
    })
}
