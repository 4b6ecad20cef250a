//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::collections::{BTreeMap, HashMap};

use jetcount::extremal::{
    jet_realization_check, random_graph_arrangement, sharpness_report, solve_member,
};
use jetcount::fit::{cascade, dz_top, min_degree_vanishing, parameter_count_bound, CascadeStatus};
use jetcount::lift::{graph_derivatives, graph_jet, jet_at, jet_at_series, lift_degree_bound, sample_lift_points};
use jetcount::tangency::{bound_scan, count_tangencies, tangency_order_at, ArrangementGenerator};
use jetcount::{
    parse_poly, Arrangement, FieldSpec, LiftSystem, MultiPoly, PlaneCurve, PlanePoint, Scalar, SharpFamilySpec,
    TangencyOrder, UniPoly,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    match field.modulus() {
        Some(p) => Scalar::from_u64(field, rng.random_range(0..p)),
        None => Scalar::from_i64(field, rng.random_range(-4..=4)),
    }
}

fn random_uni(rng: &mut ChaCha8Rng, field: FieldSpec, max_deg: usize) -> UniPoly {
    let deg = rng.random_range(0..=max_deg);
    UniPoly::from_coeffs(field, (0..=deg).map(|_| random_scalar(rng, field)).collect())
}

#[test]
fn criterion_01_circle_lift_exactness() {
    let q = FieldSpec::rationals();
    let circle = PlaneCurve::new(parse_poly(q, 2, "x^2 + y^2 - 1").unwrap(), "circle").unwrap();
    let sys = LiftSystem::new(&circle, 2).unwrap();
    let p1 = parse_poly(q, 4, "2x + 2y*z1").unwrap();
    let p2 = parse_poly(q, 4, "2 + 2z1^2 + 2y*z2").unwrap();
    let ok = sys.generators()[1] == p1 && sys.generators()[2] == p2;
    verdict(
        1,
        ok,
        &format!("P1 = {}, P2 = {}", sys.generators()[1], sys.generators()[2]),
    );
}

#[test]
fn criterion_02_top_variable_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fields = [
        FieldSpec::rationals(),
        FieldSpec::prime(5).unwrap(),
        FieldSpec::prime(7).unwrap(),
        FieldSpec::prime(11).unwrap(),
    ];
    let mut checked = 0;
    let mut bad = Vec::new();
    for field in fields {
        let mut accepted = 0;
        while accepted < 200 {
            let max_deg = match field.modulus() {
                Some(p) => 4.min(p as u32 - 1),
                None => 4,
            };
            let deg = rng.random_range(1..=max_deg);
            let mut terms = Vec::new();
            for a in 0..=deg {
                for b in 0..=deg - a {
                    if rng.random_bool(0.6) {
                        terms.push((vec![a, b], random_scalar(&mut rng, field)));
                    }
                }
            }
            let f = MultiPoly::from_terms(field, 2, terms).unwrap();
            let Ok(curve) = PlaneCurve::new(f, "random") else { continue };
            if curve.poly().degree_in(1) == 0 {
                continue;
            }
            accepted += 1;
            for k in 1..=3usize {
                let sys = LiftSystem::new(&curve, k).unwrap();
                let fy = curve.partial_y().with_num_vars(2 + k).unwrap();
                for j in 1..=k {
                    checked += 1;
                    if sys.generators()[j].partial_derivative(j + 1).unwrap() != fy {
                        bad.push(format!("{} over {field}, j={j}", curve.poly()));
                    }
                }
            }
        }
    }
    verdict(2, bad.is_empty(), &format!("{checked} identities checked, {} mismatches", bad.len()));
}

#[test]
fn criterion_03_jet_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut bad = Vec::new();
    for trial in 0..200 {
        let field = match trial % 4 {
            0 | 1 => FieldSpec::rationals(),
            2 => FieldSpec::prime(7).unwrap(),
            _ => FieldSpec::prime(13).unwrap(),
        };
        let k = rng.random_range(1..=4usize);
        let g = random_uni(&mut rng, field, 6);
        let curve = PlaneCurve::graph_of(&g, format!("g{trial}")).unwrap();
        for _ in 0..5 {
            let x = random_scalar(&mut rng, field);
            let point = PlanePoint::new(x.clone(), g.evaluate(&x));
            let direct: Vec<Scalar> = (1..=k).map(|j| g.nth_derivative(j).evaluate(&x)).collect();
            let sequential = jet_at(&curve, &point, k).unwrap();
            let series = jet_at_series(&curve, &point, k).unwrap();
            checked += 1;
            if sequential.derivatives != direct || series.derivatives != direct {
                bad.push(format!("{} at {point}", g.evaluate(&x)));
            }
        }
    }
    verdict(3, bad.is_empty(), &format!("{checked} jets compared, {} mismatches", bad.len()));
}

#[test]
fn criterion_04_planted_tangency_orders() {
    let q = FieldSpec::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let origin = PlanePoint::from_i64(q, 0, 0);
    let mut checked = 0;
    let mut bad = Vec::new();
    for _ in 0..100 {
        for m in 1..=5usize {
            let mut c = vec![Scalar::zero(q)];
            c.extend((0..5).map(|_| random_scalar(&mut rng, q)));
            let g = UniPoly::from_coeffs(q, c);
            let mut u = random_uni(&mut rng, q, 3);
            if u.coeff(0).is_zero() {
                u = &u + &UniPoly::one(q);
            }
            let shift = UniPoly::from_coeffs(q, [vec![Scalar::zero(q); m], vec![Scalar::one(q)]].concat());
            let h = &g + &(&shift * &u);
            let a = PlaneCurve::graph_of(&g, "g").unwrap();
            let b = PlaneCurve::graph_of(&h, "h").unwrap();
            let got = tangency_order_at(&a, &b, &origin, 6).unwrap();
            checked += 1;
            if got != TangencyOrder::Order(m - 1) {
                bad.push(format!("m={m}: {got:?}"));
            }
        }
    }
    verdict(4, bad.is_empty(), &format!("{checked} planted pairs, {} mismatches", bad.len()));
}

/// All points, all pairs: `m(p)` counts curves through `p` with some other
/// curve sharing the `k`-jet there.
fn naive_total(arr: &Arrangement) -> u64 {
    let field = arr.field();
    let p = field.modulus().unwrap();
    let k = arr.k();
    let mut total = 0;
    for x in 0..p {
        let xs = Scalar::from_u64(field, x);
        for y in 0..p {
            let ys = Scalar::from_u64(field, y);
            let jets: Vec<Vec<Scalar>> = arr
                .curves()
                .iter()
                .filter_map(|c| {
                    let g = c.graph().unwrap();
                    (g.evaluate(&xs) == ys).then(|| (1..=k).map(|j| g.nth_derivative(j).evaluate(&xs)).collect())
                })
                .collect();
            for (i, a) in jets.iter().enumerate() {
                if jets.iter().enumerate().any(|(j, b)| i != j && a == b) {
                    total += 1;
                }
            }
        }
    }
    total
}

#[test]
fn criterion_05_counting_oracle_equivalence() {
    let mut cases = 0;
    let mut bad = Vec::new();
    for p in [3u64, 5, 7] {
        for k in [1usize, 2] {
            for seed in 0..12u64 {
                let n = 2 + (seed as usize % 11);
                let arr = random_graph_arrangement(n, 3.min(p as u32 - 1), p, k, seed * 31 + p).unwrap();
                let fast = count_tangencies(&arr).unwrap().total;
                let slow = naive_total(&arr);
                cases += 1;
                if fast != slow {
                    bad.push(format!("p={p} k={k} seed={seed}: {fast} vs {slow}"));
                }
            }
        }
    }
    verdict(5, bad.is_empty(), &format!("{cases} arrangements, mismatches: {bad:?}"));
}

const SHARP_CASES: [(u64, usize); 5] = [(3, 1), (5, 1), (5, 2), (7, 1), (7, 2)];

#[test]
fn criterion_06_jet_bijection() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (p, k) in SHARP_CASES {
        let r = jet_realization_check(&SharpFamilySpec::new(p, k).unwrap());
        ok &= r.ok && r.jets_checked == (p as u128).pow(k as u32 + 2);
        lines.push(format!("(p={p},k={k}) {} jets ok={}", r.jets_checked, r.ok));
    }
    verdict(6, ok, &lines.join("; "));
}

#[test]
fn criterion_07_sharpness_at_desk_scale() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (p, k) in SHARP_CASES {
        let r = sharpness_report(&SharpFamilySpec::new(p, k).unwrap(), &[]).unwrap();
        let quarter = r.reference / 4.0;
        let matched: Vec<&str> = r.closed_forms.iter().filter(|c| c.matches).map(|c| c.expression.as_str()).collect();
        ok &= (r.sum_m as f64) >= quarter && r.counts_agree;
        lines.push(format!(
            "(p={p},k={k}) |C|={} sum_m={} >= {:.1}, matches {:?}",
            r.size, r.sum_m, quarter, matched
        ));
    }
    verdict(7, ok, &lines.join("; "));
}

#[test]
fn criterion_08_subsample_bound() {
    let spec = SharpFamilySpec::new(5, 1).unwrap();
    let seeds: Vec<u64> = (0..20).collect();
    let r = sharpness_report(&spec, &seeds).unwrap();
    let meeting = r.subsamples.iter().filter(|s| s.meets_one_hundredth).count();
    verdict(
        8,
        meeting >= 19,
        &format!("{meeting}/20 subsamples meet |C|^(3/2)/100"),
    );
}

/// Distinct members of `C_1` chosen by seeded coefficients.
fn sampled_c1(spec: &SharpFamilySpec, m: usize, seed: u64) -> Vec<PlaneCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < m {
        let a: Vec<u64> = (0..=spec.k()).map(|_| rng.random_range(0..spec.p())).collect();
        if seen.insert(a.clone()) {
            out.push(spec.curve(spec.index_of(1, &a)));
        }
    }
    out
}

#[test]
fn criterion_09_fit_soundness_and_degree_bound() {
    let k = 2;
    let spec = SharpFamilySpec::new(101, k).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for m in [1usize, 5, 10, 25, 50] {
        let curves = sampled_c1(&spec, m, 9 + m as u64);
        let fit = min_degree_vanishing(&curves, k).unwrap();
        let bound = parameter_count_bound(&curves, k);
        let mut fresh_ok = !fit.polynomial.is_zero();
        for c in &curves {
            let used = (lift_degree_bound(c, k) * fit.degree as u64 + 1) as usize;
            let jets = sample_lift_points(c, k, used + 25, 0).unwrap();
            for j in &jets[used..] {
                fresh_ok &= fit.polynomial.evaluate(&j.coords()).unwrap().is_zero();
            }
        }
        ok &= fresh_ok && fit.degree <= bound && fit.minimality_certified;
        lines.push(format!("m={m} deg={} bound={bound} fresh_ok={fresh_ok}", fit.degree));
    }
    verdict(9, ok, &lines.join("; "));
}

#[test]
fn criterion_10_top_derivative_vanishes_at_shared_jets() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (p, k, jets) in [(101u64, 1usize, 6usize), (101, 2, 5)] {
        let spec = SharpFamilySpec::new(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10 + k as u64);
        let mut curves: BTreeMap<u128, PlaneCurve> = BTreeMap::new();
        for _ in 0..jets {
            let w: Vec<u64> = (0..k + 2).map(|_| rng.random_range(0..p)).collect();
            for i in [1, 2] {
                let idx = spec.index_of(i, &solve_member(&spec, i, &w));
                curves.insert(idx, spec.curve(idx));
            }
        }
        let curves: Vec<PlaneCurve> = curves.into_values().collect();
        let arr = Arrangement::new(spec.field(), k, curves.clone()).unwrap();
        let report = count_tangencies(&arr).unwrap();
        let fit = min_degree_vanishing(&curves, k).unwrap();
        let q = dz_top(&fit.polynomial, k).unwrap();
        let by_label: HashMap<&str, &PlaneCurve> = curves.iter().map(|c| (c.label(), c)).collect();
        let mut witnessed = 0;
        for rec in &report.records {
            let mut groups: BTreeMap<Vec<Scalar>, usize> = BTreeMap::new();
            for l in &rec.participants {
                let c = by_label[l.as_str()];
                let j = graph_jet(&graph_derivatives(c.graph().unwrap(), k), &rec.point.x);
                *groups.entry(j.coords()).or_default() += 1;
            }
            for (coords, count) in groups {
                if count >= 2 {
                    witnessed += 1;
                    ok &= q.evaluate(&coords).unwrap().is_zero();
                }
            }
        }
        ok &= witnessed >= jets && !q.is_zero();
        lines.push(format!(
            "(p={p},k={k}) {} curves, deg P={}, {witnessed} shared jets checked",
            curves.len(),
            fit.degree
        ));
    }
    verdict(10, ok, &lines.join("; "));
}

#[test]
fn criterion_11_cascade_demo() {
    let k = 1;
    let spec = SharpFamilySpec::new(101, k).unwrap();
    // five jets, each carried by one member of C_1 and one of C_2
    let mut chosen: BTreeMap<u128, PlaneCurve> = BTreeMap::new();
    for w in [[0u64, 0, 0], [1, 1, 1], [2, 3, 4], [3, 0, 2], [4, 4, 0]] {
        for i in [1, 2] {
            let idx = spec.index_of(i, &solve_member(&spec, i, &w));
            chosen.insert(idx, spec.curve(idx));
        }
    }
    let curves: Vec<PlaneCurve> = chosen.into_values().collect();
    let trace = cascade(&curves, k).unwrap();
    let rich = trace.rich_curves.iter().filter(|(_, c)| *c > 0).count();
    let ok = curves.len() == 10
        && trace.status == CascadeStatus::Complete
        && trace.p0.as_ref().is_some_and(|p| !p.is_zero())
        && trace.p0_vanishes_on_all == Some(true)
        && trace.degree_consistent == Some(true);
    verdict(
        11,
        ok,
        &format!(
            "{} curves ({rich} tangent), deg P_1 = {}, status {:?}, sum of degrees {}",
            curves.len(),
            trace.steps[0].fit.degree,
            trace.status,
            trace.sum_curve_degrees
        ),
    );
}

#[test]
fn criterion_12_bound_scan_power_law() {
    let n_values: Vec<usize> = (10..=200).step_by(10).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    // only k = 1 crosses several admissible primes for n <= 200
    for k in [1usize] {
        let scan = bound_scan(&ArrangementGenerator::SharpTruncation { p: None }, &n_values, k, 0).unwrap();
        let cap = scan.reference_exponent + 0.15;
        let exponent = scan.fitted_exponent.unwrap_or(f64::NAN);
        let under = scan.rows.iter().all(|r| (r.total as f64) <= (r.n as f64).powf(cap));
        ok &= exponent <= cap && under;
        lines.push(format!("k={k} fitted exponent {exponent:.3} (cap {cap:.3}), totals under n^cap: {under}"));
    }
    verdict(12, ok, &lines.join("; "));
}
