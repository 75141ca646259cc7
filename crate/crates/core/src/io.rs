//! JSON input specs and element encodings.
//!
//! A spec is either `{"family": name, "params": {...}}` or explicit rows
//! `{"mode": "exact"|"float", "universe": "finite:N", "rows": {...}}`.
//! Elements are arrays of `[vertex, re, im]` triples with rationals as
//! `"p/q"` strings (exact) or plain numbers (float).

use serde_json::{json, Value};

use crate::algebra::{ApproxElement, Element, Expansion};
use crate::error::{Error, Result};
use crate::families::{build_family, ExplicitRows, FamilySpec};
use crate::scalar::{format_rational, parse_rational, rational, Scalar, ScalarMode};
use crate::structure::{EvolutionStructure, VertexId};

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
}

/// Parses a spec from JSON text.
pub fn parse_input_spec(text: &str) -> Result<EvolutionStructure> {
    structure_from_value(&parse_json(text)?)
}

pub fn spec_from_value(v: &Value) -> Result<FamilySpec> {
    if v.get("family").is_some() {
        FamilySpec::from_json(v)
    } else {
        Ok(FamilySpec::FiniteExplicit(ExplicitRows::from_json(v)?))
    }
}

pub fn structure_from_value(v: &Value) -> Result<EvolutionStructure> {
    let spec = spec_from_value(v)?;
    build_family(&spec).map_err(|e| match e {
        Error::InvalidParams(m) => Error::Validation(m),
        other => other,
    })
}

/// The input a structure was built from, as JSON. Explicit rows are
/// written in the bare row format.
pub fn serialize_structure(s: &EvolutionStructure) -> Option<Value> {
    Some(match s.spec()? {
        FamilySpec::FiniteExplicit(rows) => rows.to_json(),
        other => other.to_json(),
    })
}

fn scalar_parts(c: &Scalar) -> (Value, Value) {
    match c {
        Scalar::Exact(z) => (json!(format_rational(&z.re)), json!(format_rational(&z.im))),
        Scalar::Float(z) => (json!(z.re), json!(z.im)),
    }
}

pub fn element_to_json(e: &Element) -> Value {
    Value::Array(
        e.iter()
            .map(|(k, c)| {
                let (re, im) = scalar_parts(c);
                json!([k.get(), re, im])
            })
            .collect(),
    )
}

pub fn expansion_to_json(x: &Expansion) -> Value {
    match x {
        Expansion::Exact(e) => json!({ "exact": true, "coefficients": element_to_json(e) }),
        Expansion::Approx(ApproxElement { prefix, cutoff, tail_norm_bound }) => json!({
            "exact": false,
            "coefficients": element_to_json(prefix),
            "cutoff": cutoff,
            "tail_norm_bound": tail_norm_bound,
        }),
    }
}

fn part(v: &Value, mode: ScalarMode, ctx: &str) -> Result<Scalar> {
    match (mode, v) {
        (ScalarMode::Exact, Value::String(s)) => Ok(Scalar::from_rational(parse_rational(s)?)),
        (ScalarMode::Exact, Value::Number(n)) if n.is_i64() => Ok(Scalar::integer(n.as_i64().unwrap())),
        (ScalarMode::Float, Value::Number(n)) => Ok(Scalar::from_f64(n.as_f64().unwrap())),
        (ScalarMode::Float, Value::String(s)) => {
            Ok(Scalar::from_rational(parse_rational(s)?).to_mode(ScalarMode::Float))
        }
        _ => Err(Error::Parse(format!("{ctx}: bad coefficient {v}"))),
    }
}

/// Parses `[[vertex, re, im?], ...]`.
pub fn element_from_json(v: &Value, mode: ScalarMode) -> Result<Element> {
    let list = v.as_array().ok_or_else(|| Error::Parse("element must be a JSON array".into()))?;
    let mut terms = Vec::with_capacity(list.len());
    for (pos, t) in list.iter().enumerate() {
        let ctx = format!("element[{pos}]");
        let t = t
            .as_array()
            .filter(|t| (2..=3).contains(&t.len()))
            .ok_or_else(|| Error::Parse(format!("{ctx}: expected [vertex, re, im]")))?;
        let k = t[0]
            .as_u64()
            .and_then(VertexId::try_new)
            .ok_or_else(|| Error::Parse(format!("{ctx}: vertex must be a positive integer")))?;
        let re = part(&t[1], mode, &ctx)?;
        let c = match t.get(2) {
            Some(im) => {
                let im = part(im, mode, &ctx)?;
                re + im * Scalar::complex_rational(rational(0, 1), rational(1, 1)).to_mode(mode)
            }
            None => re,
        };
        terms.push((k, c));
    }
    Ok(Element::from_terms(terms))
}

pub fn parse_element(text: &str, mode: ScalarMode) -> Result<Element> {
    element_from_json(&parse_json(text)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_and_explicit_specs() {
        let comb = parse_input_spec(r#"{"family":"comb"}"#).unwrap();
        assert_eq!(comb.spec().unwrap().name(), "comb");
        let path = parse_input_spec(r#"{"rows":{"1":[[2,"1/1"]]}, "universe":"finite:2"}"#).unwrap();
        assert_eq!(path.weight(VertexId::new(1), VertexId::new(2)), Some(Scalar::integer(1)));
        let zero = parse_input_spec(r#"{"rows":{"1":[[2,"0/1"]]}, "universe":"finite:2"}"#);
        assert!(matches!(zero, Err(Error::Validation(m)) if m.contains("zero weight")));
        assert!(matches!(parse_input_spec("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_input_spec(r#"{"family":"rary_tree","params":{"r":1}}"#), Err(Error::Validation(_))));
    }

    #[test]
    fn elements_round_trip() {
        let e = parse_element(r#"[[2,"1/2","0/1"],[5,"-3/1","1/4"]]"#, ScalarMode::Exact).unwrap();
        assert_eq!(e.get(VertexId::new(2)), Some(&Scalar::ratio(1, 2)));
        assert_eq!(parse_element(&element_to_json(&e).to_string(), ScalarMode::Exact).unwrap(), e);
        let f = parse_element("[[1, 0.5, 0.0], [3, 2.0]]", ScalarMode::Float).unwrap();
        assert_eq!(f.get(VertexId::new(3)), Some(&Scalar::from_f64(2.0)));
        assert!(parse_element("[[0, \"1/1\"]]", ScalarMode::Exact).is_err());
    }
}
