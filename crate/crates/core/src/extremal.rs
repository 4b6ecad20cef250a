//! The finite-field family with many high-order tangencies, random
//! subsamples of it, and random graph arrangements.
//!
//! Over `F_p` with `p > k + 1`, the family `C_i` consists of the graphs
//! `y = i·x^(k+1) + a_k x^k + … + a_0` for `i ∈ {1, 2}` and all
//! `(a_0, …, a_k) ∈ F_p^(k+1)`. Each `C_i` realizes every jet
//! `(x, y, z_1, …, z_k)` exactly once, so the two members of `C_1 ∪ C_2`
//! carrying the same jet are tangent to order `k` there.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::field::{is_prime, FieldSpec, Scalar};
use crate::lift::{graph_derivatives, graph_jet};
use crate::poly::UniPoly;
use crate::tangency::{count_tangencies, reference_bound, Arrangement};

/// Name of the pseudorandom stream used for subsampling and random families.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SharpFamilySpec {
    p: u64,
    k: usize,
}

impl SharpFamilySpec {
    /// Requires `p` prime, `k ≥ 1` and `p > k + 1`.
    pub fn new(p: u64, k: usize) -> Result<Self> {
        FieldSpec::prime(p)?;
        if k < 1 {
            return Err(Error::InvalidOrder { min: 1, got: k });
        }
        if p <= k as u64 + 1 {
            return Err(Error::ConstraintViolated(format!(
                "sharp family needs p > k + 1, got p = {p}, k = {k}"
            )));
        }
        Ok(SharpFamilySpec { p, k })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec::prime(self.p).expect("validated prime")
    }

    /// `p^(k+1)`, the size of each of `C_1`, `C_2`.
    pub fn per_family(&self) -> u128 {
        (self.p as u128).pow(self.k as u32 + 1)
    }

    /// `2 p^(k+1)`.
    pub fn family_size(&self) -> u128 {
        2 * self.per_family()
    }

    /// `(i, [a_0, …, a_k])` of the curve at `index`. Curves come in pairs
    /// `i = 1, 2` sharing `a`, and `a` counts up with `a_0` fastest.
    pub fn parameters(&self, index: u128) -> (u64, Vec<u64>) {
        let i = (index % 2) as u64 + 1;
        let mut rest = index / 2;
        let mut a = Vec::with_capacity(self.k + 1);
        for _ in 0..=self.k {
            a.push((rest % self.p as u128) as u64);
            rest /= self.p as u128;
        }
        (i, a)
    }

    /// Inverse of [`SharpFamilySpec::parameters`].
    pub fn index_of(&self, i: u64, a: &[u64]) -> u128 {
        let a_idx = a.iter().rev().fold(0u128, |acc, &d| acc * self.p as u128 + d as u128);
        2 * a_idx + (i - 1) as u128
    }

    pub fn polynomial(&self, i: u64, a: &[u64]) -> UniPoly {
        let field = self.field();
        let mut c: Vec<Scalar> = a.iter().map(|&v| Scalar::from_u64(field, v)).collect();
        c.push(Scalar::from_u64(field, i));
        UniPoly::from_coeffs(field, c)
    }

    pub fn label(i: u64, a: &[u64]) -> String {
        let parts: Vec<String> = a.iter().map(u64::to_string).collect();
        format!("C{i}[{}]", parts.join(","))
    }

    pub fn curve(&self, index: u128) -> PlaneCurve {
        let (i, a) = self.parameters(index);
        PlaneCurve::graph_of(&self.polynomial(i, &a), Self::label(i, &a)).expect("graphs of degree k+1 < p are valid")
    }

    /// The curves in index order, produced lazily.
    pub fn curves(&self) -> impl Iterator<Item = PlaneCurve> + '_ {
        (0..self.family_size()).map(move |i| self.curve(i))
    }
}

/// The full family `C_1 ∪ C_2` as an arrangement of order `k`.
pub fn build_sharp_family(spec: &SharpFamilySpec) -> Result<Arrangement> {
    let n = usize::try_from(spec.family_size()).map_err(|_| Error::TooManyCurves {
        requested: spec.family_size(),
        available: usize::MAX as u128,
    })?;
    sharp_family_prefix(spec, n)
}

/// The first `n` curves of the family in index order.
pub fn sharp_family_prefix(spec: &SharpFamilySpec, n: usize) -> Result<Arrangement> {
    if n as u128 > spec.family_size() {
        return Err(Error::TooManyCurves {
            requested: n as u128,
            available: spec.family_size(),
        });
    }
    Arrangement::new(spec.field(), spec.k, (0..n as u128).map(|i| spec.curve(i)).collect())
}

/// Smallest prime `p > k + 1` whose family has at least `n` curves.
pub fn smallest_sharp_prime(n: usize, k: usize) -> Result<u64> {
    let mut p = k as u64 + 2;
    loop {
        if is_prime(p) && SharpFamilySpec::new(p, k)?.family_size() >= n as u128 {
            return Ok(p);
        }
        p += 1;
    }
}

/// The unique member of `C_i` whose graph has the jet `w = (x, y, z_1, …, z_k)`.
///
/// With `q = h - i·t^(k+1)` of degree `≤ k`, the conditions `h^(j)(x) = z_j`
/// fix the Taylor coefficients `q^(j)(x)/j!` at `x`, so
/// `q(t) = Σ_j r_j/j! (t - x)^j` with `r_j = z_j - i·(k+1)!/(k+1-j)!·x^(k+1-j)`.
pub fn solve_member(spec: &SharpFamilySpec, i: u64, jet: &[u64]) -> Vec<u64> {
    let field = spec.field();
    let k = spec.k;
    let x = Scalar::from_u64(field, jet[0]);
    let s = |v: u64| Scalar::from_u64(field, v);
    let lead = spec.polynomial(i, &vec![0; k + 1]);
    let mut q = UniPoly::zero(field);
    let shift = UniPoly::from_coeffs(field, vec![-x.clone(), Scalar::one(field)]);
    let mut shift_pow = UniPoly::one(field);
    let mut fact = Scalar::one(field);
    let mut lead_d = lead;
    for j in 0..=k {
        if j > 0 {
            fact = fact.mul_int(j as u64);
            lead_d = lead_d.derivative();
        }
        let r = &s(jet[j + 1]) - &lead_d.evaluate(&x);
        let coeff = r.checked_div(&fact).expect("j! invertible for j < p");
        q = &q + &shift_pow.scale(&coeff);
        shift_pow = &shift_pow * &shift;
    }
    (0..=k).map(|j| q.coeff(j).residue().expect("prime field")).collect()
}

/// All jets of all family members, keyed by jet, listing the curve indices.
fn enumerate_family_jets(spec: &SharpFamilySpec) -> HashMap<Vec<u64>, Vec<u128>> {
    let field = spec.field();
    let mut out: HashMap<Vec<u64>, Vec<u128>> = HashMap::new();
    for idx in 0..spec.family_size() {
        let (i, a) = spec.parameters(idx);
        let derivs = graph_derivatives(&spec.polynomial(i, &a), spec.k);
        for x in 0..spec.p {
            let j = graph_jet(&derivs, &Scalar::from_u64(field, x));
            let key: Vec<u64> = j.coords().iter().map(|s| s.residue().expect("prime field")).collect();
            out.entry(key).or_default().push(idx);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetRealization {
    pub p: u64,
    pub k: usize,
    pub jets_checked: u128,
    pub ok: bool,
    /// Human-readable descriptions of the first failures, if any.
    pub failures: Vec<String>,
    /// Jet `(x, y, z_1, …, z_k)` to the family indices of its `C_1` and `C_2` members.
    pub witness: BTreeMap<Vec<u64>, [u128; 2]>,
}

/// Checks that every jet in `F_p^(k+2)` is carried by exactly one member of
/// each `C_i`: once by the Taylor solve and once by enumerating every
/// member's jets at every abscissa.
pub fn jet_realization_check(spec: &SharpFamilySpec) -> JetRealization {
    let enumerated = enumerate_family_jets(spec);
    let p = spec.p;
    let dim = spec.k + 2;
    let total = (p as u128).pow(dim as u32);
    let mut failures = Vec::new();
    let mut witness = BTreeMap::new();
    let mut jet = vec![0u64; dim];
    for _ in 0..total {
        let mut pair = [0u128; 2];
        for (slot, i) in [1u64, 2].into_iter().enumerate() {
            let a = solve_member(spec, i, &jet);
            let idx = spec.index_of(i, &a);
            pair[slot] = idx;
            let carriers: Vec<u128> = enumerated
                .get(&jet)
                .map(|v| v.iter().copied().filter(|&c| c % 2 == (i - 1) as u128).collect())
                .unwrap_or_default();
            if carriers != [idx] && failures.len() < 10 {
                failures.push(format!("jet {jet:?}, family C{i}: solved {idx}, enumerated {carriers:?}"));
            }
        }
        witness.insert(jet.clone(), pair);
        for d in jet.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
    let ok = failures.is_empty() && enumerated.len() as u128 == total;
    JetRealization {
        p,
        k: spec.k,
        jets_checked: total,
        ok,
        failures,
        witness,
    }
}

/// Keeps each curve independently with probability `num/den`.
pub fn random_subsample(arr: &Arrangement, num: u64, den: u64, seed: u64) -> Result<Arrangement> {
    if den == 0 || num > den {
        return Err(Error::ConstraintViolated(format!("probability {num}/{den} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep: Vec<bool> = (0..arr.len()).map(|_| rng.random_range(0..den) < num).collect();
    Ok(arr.filter_indexed(|i| keep[i]))
}

fn graph_label(prefix: &str, coeffs: &[u64]) -> String {
    let parts: Vec<String> = coeffs.iter().map(u64::to_string).collect();
    format!("{prefix}[{}]", parts.join(","))
}

fn graph_curve(field: FieldSpec, coeffs: &[u64], label: String) -> Result<PlaneCurve> {
    let g = UniPoly::from_coeffs(field, coeffs.iter().map(|&c| Scalar::from_u64(field, c)).collect());
    PlaneCurve::graph_of(&g, label)
}

/// `n` distinct graphs `y = g(x)` with `deg g ≤ max_deg` over `F_p`.
///
/// Asking for the whole family returns it in a fixed order regardless of
/// `seed`; otherwise coefficient vectors are drawn uniformly and duplicates
/// rejected.
pub fn random_graph_arrangement(n: usize, max_deg: u32, p: u64, k: usize, seed: u64) -> Result<Arrangement> {
    let field = FieldSpec::prime(p)?;
    let len = max_deg as usize + 1;
    let available = (p as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if n as u128 > available {
        return Err(Error::TooManyCurves {
            requested: n as u128,
            available,
        });
    }
    let mut vectors: Vec<Vec<u64>> = Vec::with_capacity(n);
    if n as u128 == available {
        for idx in 0..available {
            let mut rest = idx;
            vectors.push(
                (0..len)
                    .map(|_| {
                        let d = (rest % p as u128) as u64;
                        rest /= p as u128;
                        d
                    })
                    .collect(),
            );
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::with_capacity(n);
        while vectors.len() < n {
            let v: Vec<u64> = (0..len).map(|_| rng.random_range(0..p)).collect();
            if seen.insert(v.clone()) {
                vectors.push(v);
            }
        }
    }
    let curves = vectors
        .iter()
        .map(|v| graph_curve(field, v, graph_label("g", v)))
        .collect::<Result<Vec<_>>>()?;
    Arrangement::new(field, k, curves)
}

/// `n ≤ p` translates `y = g(x) + c`, `c = 0, …, n-1`, of one random `g`
/// with zero constant term. Distinct translates never meet.
pub fn parallel_translates(n: usize, base_deg: u32, p: u64, k: usize, seed: u64) -> Result<Arrangement> {
    let field = FieldSpec::prime(p)?;
    if n as u64 > p {
        return Err(Error::TooManyCurves {
            requested: n as u128,
            available: p as u128,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g: Vec<u64> = (0..=base_deg).map(|_| rng.random_range(0..p)).collect();
    let curves = (0..n as u64)
        .map(|c| {
            g[0] = c;
            graph_curve(field, &g, format!("t[{c}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    Arrangement::new(field, k, curves)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub expression: String,
    pub value: u128,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsampleRow {
    pub seed: u64,
    pub size: usize,
    pub sum_m: u64,
    pub ratio: f64,
    pub meets_one_hundredth: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub p: u64,
    pub k: usize,
    pub size: u128,
    /// `Σ_p m_k(p)` for the full family, counted point by point.
    pub sum_m: u64,
    /// The same sum aggregated jet by jet from the enumerated family jets.
    pub sum_m_per_jet: u64,
    pub counts_agree: bool,
    /// `|C|^((k+2)/(k+1))`, approximate.
    pub reference: f64,
    pub ratio: f64,
    /// The closed form predicted by the jet bijection: every point carries
    /// `2p^k` curves, all of which have a partner.
    pub predicted_closed_form: ClosedForm,
    #[serde(rename = "match")]
    pub matches_prediction: bool,
    /// Every candidate closed form and whether the enumerated value equals it.
    pub closed_forms: Vec<ClosedForm>,
    pub subsample_probability: String,
    pub rng: String,
    pub subsamples: Vec<SubsampleRow>,
    /// Fraction of subsamples with `Σm ≥ |C|^((k+2)/(k+1)) / 100`.
    pub fraction_meeting_one_hundredth: Option<f64>,
}

/// Exact `Σm` for the full family and for `1/4`-subsamples under each seed.
pub fn sharpness_report(spec: &SharpFamilySpec, seeds: &[u64]) -> Result<SharpnessReport> {
    let full = build_sharp_family(spec)?;
    let report = count_tangencies(&full)?;
    let per_jet: u64 = enumerate_family_jets(spec)
        .values()
        .filter(|v| v.len() >= 2)
        .map(|v| v.len() as u64)
        .sum();
    let size = spec.family_size();
    let p = spec.p as u128;
    let k = spec.k as u32;
    let sum = report.total as u128;
    let form = |expression: &str, value: u128| ClosedForm {
        expression: expression.to_string(),
        value,
        matches: value == sum,
    };
    let predicted = form("2p^(k+2)", 2 * p.pow(k + 2));
    let closed_forms = vec![
        form("p^(k+1)", p.pow(k + 1)),
        form("p^(k+2)", p.pow(k + 2)),
        predicted.clone(),
    ];
    let reference = reference_bound(size as usize, spec.k);
    let mut subsamples = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let sub = random_subsample(&full, 1, 4, seed)?;
        let r = count_tangencies(&sub)?;
        let reference = reference_bound(sub.len(), spec.k);
        let ratio = if reference > 0.0 { r.total as f64 / reference } else { 0.0 };
        subsamples.push(SubsampleRow {
            seed,
            size: sub.len(),
            sum_m: r.total,
            ratio,
            meets_one_hundredth: ratio >= 0.01,
        });
    }
    let fraction = (!subsamples.is_empty())
        .then(|| subsamples.iter().filter(|r| r.meets_one_hundredth).count() as f64 / subsamples.len() as f64);
    Ok(SharpnessReport {
        p: spec.p,
        k: spec.k,
        size,
        sum_m: report.total,
        sum_m_per_jet: per_jet,
        counts_agree: per_jet == report.total,
        reference,
        ratio: report.total as f64 / reference,
        matches_prediction: predicted.matches,
        predicted_closed_form: predicted,
        closed_forms,
        subsample_probability: "1/4".into(),
        rng: RNG_ALGORITHM.into(),
        subsamples,
        fraction_meeting_one_hundredth: fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let s = SharpFamilySpec::new(3, 1).unwrap();
        assert_eq!(build_sharp_family(&s).unwrap().len(), 18);
        assert!(matches!(SharpFamilySpec::new(2, 1), Err(Error::ConstraintViolated(_))));
        let s = SharpFamilySpec::new(5, 2).unwrap();
        assert_eq!(build_sharp_family(&s).unwrap().len(), 250);
    }

    #[test]
    fn parameters_round_trip() {
        let s = SharpFamilySpec::new(5, 2).unwrap();
        for idx in 0..s.family_size() {
            let (i, a) = s.parameters(idx);
            assert_eq!(s.index_of(i, &a), idx);
        }
        assert_eq!(s.curve(3).label(), "C2[1,0,0]");
    }

    #[test]
    fn solve_examples() {
        let s = SharpFamilySpec::new(5, 1).unwrap();
        assert_eq!(solve_member(&s, 1, &[0, 0, 0]), vec![0, 0]);
        assert_eq!(solve_member(&s, 2, &[0, 0, 0]), vec![0, 0]);
        let s = SharpFamilySpec::new(5, 2).unwrap();
        // at x = 0: a_0 = y, a_1 = z_1, a_2 = z_2 / 2
        assert_eq!(solve_member(&s, 1, &[0, 3, 4, 1]), vec![3, 4, 3]);
    }

    #[test]
    fn small_realization() {
        let r = jet_realization_check(&SharpFamilySpec::new(3, 1).unwrap());
        assert!(r.ok, "{:?}", r.failures);
        assert_eq!(r.jets_checked, 27);
        assert_eq!(r.witness.len(), 27);
    }

    #[test]
    fn subsample_extremes() {
        let full = build_sharp_family(&SharpFamilySpec::new(3, 1).unwrap()).unwrap();
        assert_eq!(random_subsample(&full, 1, 1, 9).unwrap(), full);
        assert!(random_subsample(&full, 0, 4, 9).unwrap().is_empty());
        assert_eq!(random_subsample(&full, 1, 4, 9).unwrap(), random_subsample(&full, 1, 4, 9).unwrap());
    }

    #[test]
    fn random_graph_edge_cases() {
        let all = random_graph_arrangement(9, 1, 3, 1, 5).unwrap();
        assert_eq!(all, random_graph_arrangement(9, 1, 3, 1, 77).unwrap());
        assert!(random_graph_arrangement(0, 2, 7, 1, 1).unwrap().is_empty());
        assert!(matches!(random_graph_arrangement(10, 1, 3, 1, 0), Err(Error::TooManyCurves { .. })));
    }

    #[test]
    fn report_for_smallest_family() {
        let r = sharpness_report(&SharpFamilySpec::new(3, 1).unwrap(), &[1, 2]).unwrap();
        assert_eq!(r.size, 18);
        assert_eq!(r.sum_m, 54);
        assert!(r.counts_agree);
        assert!(r.matches_prediction);
        assert!(!r.closed_forms[0].matches);
        assert_eq!(r.subsamples.len(), 2);
    }
}
