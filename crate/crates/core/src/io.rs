//! JSON forms for scalars, polynomials, curves and arrangements.
//!
//! Every scalar is written as a string: a decimal residue over 𝔽_p, an
//! integer or `a/b` over ℚ. Readers also accept bare JSON integers.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::curve::{PlaneCurve, PlanePoint};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::lift::Jet;
use crate::poly::{parse_poly, MultiPoly, UniPoly};
use crate::tangency::Arrangement;

/// Version stamped into every document this crate writes.
pub const FORMAT_VERSION: &str = "1.0";

/// Accepts any `1.x` version string.
pub fn check_version(version: &str) -> Result<()> {
    match version.split('.').next() {
        Some("1") => Ok(()),
        _ => Err(Error::UnsupportedVersion(version.to_string())),
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.modulus() {
            None => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "Q")?;
                m.end()
            }
            Some(p) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "Fp")?;
                m.serialize_entry("p", &p)?;
                m.end()
            }
        }
    }
}

impl Serialize for PlanePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PlanePoint", 2)?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("y", &self.y)?;
        st.end()
    }
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Jet", 3)?;
        st.serialize_field("x", &self.base.x)?;
        st.serialize_field("y", &self.base.y)?;
        st.serialize_field("z", &self.derivatives)?;
        st.end()
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(&[u32], &Scalar)> = self
            .terms()
            .rev()
            .map(|(m, c)| (m.exponents(), c))
            .collect();
        let mut st = s.serialize_struct("MultiPoly", 3)?;
        st.serialize_field("field", &self.field())?;
        st.serialize_field("k", &self.num_vars().saturating_sub(2))?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// A curve in its interchange form.
pub fn curve_to_value(curve: &PlaneCurve) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("label".into(), Value::String(curve.label().to_string()));
    obj.insert("field".into(), serde_json::to_value(curve.field()).expect("field"));
    let poly = serde_json::to_value(curve.poly()).expect("poly");
    obj.insert("poly".into(), poly["terms"].clone());
    if let Some(g) = curve.graph() {
        let coeffs: Vec<String> = g.coeffs().iter().map(ToString::to_string).collect();
        obj.insert("graph".into(), serde_json::to_value(coeffs).expect("graph"));
    }
    obj.insert("irreducible_asserted".into(), Value::Bool(curve.irreducible_asserted()));
    Value::Object(obj)
}

/// An arrangement document with its version stamp.
pub fn arrangement_to_value(arr: &Arrangement) -> Value {
    serde_json::json!({
        "format_version": FORMAT_VERSION,
        "field": arr.field(),
        "k": arr.k(),
        "curves": arr.curves().iter().map(curve_to_value).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize, Debug, Clone, Copy)]
#[serde(tag = "kind")]
enum FieldJson {
    Q,
    Fp { p: u64 },
}

impl FieldJson {
    fn resolve(self) -> Result<FieldSpec> {
        match self {
            FieldJson::Q => Ok(FieldSpec::rationals()),
            FieldJson::Fp { p } => FieldSpec::prime(p),
        }
    }
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum CoeffJson {
    Int(i64),
    Text(String),
}

impl CoeffJson {
    fn resolve(&self, field: FieldSpec) -> Result<Scalar> {
        match self {
            CoeffJson::Int(v) => Ok(Scalar::from_i64(field, *v)),
            CoeffJson::Text(s) => Scalar::parse(field, s),
        }
    }
}

type TermJson = (Vec<u32>, CoeffJson);

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    field: Option<FieldJson>,
    k: Option<usize>,
    terms: Vec<TermJson>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum PolySource {
    Terms(Vec<TermJson>),
    Full(PolyJson),
    Text(String),
}

#[derive(Deserialize, Debug, Clone)]
struct CurveJson {
    label: Option<String>,
    field: Option<FieldJson>,
    poly: Option<PolySource>,
    graph: Option<Vec<CoeffJson>>,
    #[serde(default)]
    irreducible_asserted: bool,
}

#[derive(Deserialize, Debug, Clone)]
struct ArrangementJson {
    format_version: Option<String>,
    field: Option<FieldJson>,
    k: Option<usize>,
    curves: Vec<CurveJson>,
}

fn from_json<'a, T: Deserialize<'a>>(src: &'a str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| {
        let text = e.to_string();
        let msg = text.rsplit_once(" at line ").map_or(text.as_str(), |(m, _)| m);
        Error::Parse(format!("line {}, column {}: {msg}", e.line(), e.column()))
    })
}

fn terms_to_poly(field: FieldSpec, num_vars: usize, terms: &[TermJson]) -> Result<MultiPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for (exps, c) in terms {
        if exps.len() != num_vars {
            return Err(Error::Parse(format!(
                "exponent vector {:?} has length {}, expected {}",
                exps,
                exps.len(),
                num_vars
            )));
        }
        out.push((exps.clone(), c.resolve(field)?));
    }
    MultiPoly::from_terms(field, num_vars, out)
}

fn poly_json_to_poly(json: &PolyJson, default_field: Option<FieldSpec>) -> Result<MultiPoly> {
    let field = match (json.field, default_field) {
        (Some(f), d) => {
            let f = f.resolve()?;
            if let Some(d) = d {
                d.check_same(&f)?;
            }
            f
        }
        (None, Some(d)) => d,
        (None, None) => return Err(Error::Parse("polynomial has no field".into())),
    };
    let num_vars = match (json.k, json.terms.first()) {
        (Some(k), _) => k + 2,
        (None, Some((e, _))) => e.len(),
        (None, None) => 2,
    };
    terms_to_poly(field, num_vars, &json.terms)
}

/// Parses a polynomial in the interchange form.
pub fn parse_multipoly_json(src: &str) -> Result<MultiPoly> {
    let json: PolyJson = from_json(src)?;
    poly_json_to_poly(&json, None)
}

fn resolve_curve(json: &CurveJson, default_field: Option<FieldSpec>, index: usize) -> Result<PlaneCurve> {
    let field = match (json.field, default_field) {
        (Some(f), Some(d)) => {
            let f = f.resolve()?;
            d.check_same(&f)?;
            f
        }
        (Some(f), None) => f.resolve()?,
        (None, Some(d)) => d,
        (None, None) => return Err(Error::Parse(format!("curve {index} has no field"))),
    };
    let label = json.label.clone().unwrap_or_else(|| format!("c{index}"));
    let from_poly = match &json.poly {
        None => None,
        Some(PolySource::Terms(t)) => Some(terms_to_poly(field, 2, t)?),
        Some(PolySource::Text(s)) => Some(parse_poly(field, 2, s)?),
        Some(PolySource::Full(p)) => {
            if p.k.is_some_and(|k| k != 0) {
                return Err(Error::NotBivariate { label });
            }
            Some(poly_json_to_poly(p, Some(field))?)
        }
    };
    let curve = match (&json.graph, from_poly) {
        (Some(g), poly) => {
            let coeffs = g.iter().map(|c| c.resolve(field)).collect::<Result<Vec<_>>>()?;
            let curve = PlaneCurve::graph_of(&UniPoly::from_coeffs(field, coeffs), label.clone())?;
            if let Some(f) = poly {
                if PlaneCurve::new(f, label.clone())?.normalized_poly() != curve.normalized_poly() {
                    return Err(Error::ConstraintViolated(format!("curve {label}: poly and graph disagree")));
                }
            }
            curve
        }
        (None, Some(f)) => PlaneCurve::new(f, label)?,
        (None, None) => return Err(Error::Parse(format!("curve {label} has neither poly nor graph"))),
    };
    Ok(if json.irreducible_asserted { curve.assert_irreducible() } else { curve })
}

/// Parses a single curve document.
pub fn parse_curve_json(src: &str) -> Result<PlaneCurve> {
    let json: CurveJson = from_json(src)?;
    resolve_curve(&json, None, 0)
}

/// The contents of an arrangement document before a tangency order is fixed.
#[derive(Clone, Debug)]
pub struct ArrangementFile {
    pub field: FieldSpec,
    pub k: Option<usize>,
    pub curves: Vec<PlaneCurve>,
}

impl ArrangementFile {
    /// Builds the arrangement, with `k` overriding the stored order.
    pub fn into_arrangement(self, k: Option<usize>) -> Result<Arrangement> {
        let k = k.or(self.k).ok_or(Error::InvalidOrder { min: 1, got: 0 })?;
        Arrangement::new(self.field, k, self.curves)
    }
}

/// Parses an arrangement document. The field may be given once at the top
/// level or on every curve.
pub fn parse_arrangement_json(src: &str) -> Result<ArrangementFile> {
    let json: ArrangementJson = from_json(src)?;
    if let Some(v) = &json.format_version {
        check_version(v)?;
    }
    let top = json.field.map(FieldJson::resolve).transpose()?;
    let first = json.curves.first().ok_or_else(|| Error::EmptyInput("arrangement has no curves".into()))?;
    let field = match (top, first.field) {
        (Some(f), _) => f,
        (None, Some(f)) => f.resolve()?,
        (None, None) => return Err(Error::Parse("arrangement has no field".into())),
    };
    let curves = json
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| resolve_curve(c, Some(field), i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ArrangementFile { field, k: json.k, curves })
}

/// Parses `"x,y"` into a point, with coordinates as in [`Scalar::parse`].
pub fn parse_point(field: FieldSpec, src: &str) -> Result<PlanePoint> {
    let (x, y) = src
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("point {src:?} is not of the form x,y")))?;
    Ok(PlanePoint::new(Scalar::parse(field, x.trim())?, Scalar::parse(field, y.trim())?))
}

/// Per-point rows of a count report, for CSV output.
pub fn count_csv_rows(report: &crate::tangency::CountReport) -> Vec<BTreeMap<&'static str, String>> {
    report
        .records
        .iter()
        .map(|r| {
            let excluded: Vec<String> = r
                .excluded
                .iter()
                .map(|(l, why)| format!("{l}:{}", serde_json::to_value(why).expect("reason").as_str().unwrap_or("")))
                .collect();
            BTreeMap::from([
                ("x", r.point.x.to_string()),
                ("y", r.point.y.to_string()),
                ("participants", r.participants.join(";")),
                ("excluded", excluded.join(";")),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_forms() {
        assert_eq!(serde_json::to_string(&FieldSpec::rationals()).unwrap(), r#"{"kind":"Q"}"#);
        assert_eq!(serde_json::to_string(&FieldSpec::prime(7).unwrap()).unwrap(), r#"{"kind":"Fp","p":7}"#);
    }

    #[test]
    fn multipoly_round_trip() {
        let q = FieldSpec::rationals();
        let p = parse_poly(q, 4, "2 + 2z1^2 - 1/3 y*z2").unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains(r#""k":2"#));
        assert_eq!(parse_multipoly_json(&text).unwrap(), p);
    }

    #[test]
    fn curve_forms() {
        let c = parse_curve_json(r#"{"label":"circle","field":{"kind":"Q"},"poly":[[[2,0],"1"],[[0,2],1],[[0,0],"-1"]]}"#).unwrap();
        assert_eq!(c.label(), "circle");
        assert_eq!(c.degree(), 2);
        let g = parse_curve_json(r#"{"label":"g","field":{"kind":"Fp","p":5},"graph":[1,0,3]}"#).unwrap();
        assert!(g.graph().is_some());
        assert!(g.irreducible_asserted());
        let again = parse_curve_json(&curve_to_value(&g).to_string()).unwrap();
        assert_eq!(again.normalized_poly(), g.normalized_poly());
    }

    #[test]
    fn arrangement_round_trip_and_versions() {
        let src = r#"{"format_version":"1.0","field":{"kind":"Q"},"k":2,
            "curves":[{"label":"a","graph":[0,0,1]},{"label":"b","poly":"y - x^2 - x^3"}]}"#;
        let arr = parse_arrangement_json(src).unwrap().into_arrangement(None).unwrap();
        assert_eq!(arr.len(), 2);
        let back = parse_arrangement_json(&arrangement_to_value(&arr).to_string()).unwrap();
        assert_eq!(back.curves.len(), 2);
        let bad = r#"{"format_version":"2.0","field":{"kind":"Q"},"curves":[{"graph":[1]}]}"#;
        assert!(matches!(parse_arrangement_json(bad), Err(Error::UnsupportedVersion(_))));
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_curve_json("{\n  \"label\": }") {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line 2, column")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn points() {
        let q = FieldSpec::rationals();
        assert_eq!(parse_point(q, "1/2, -3").unwrap().to_string(), "(1/2, -3)");
        assert!(parse_point(q, "1").is_err());
    }
}
