//! JSON codec for index sets, operators and decomposition results.
//!
//! Parsing works on [`serde_json::Value`] so that every error carries the
//! JSON pointer of the offending node.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::constructions::{Constructed, UnitarySpec};
use crate::index_arith::IndexSet;
use crate::op_algebra::{
    parse_rational, rational_to_string, AffinePiece, Coefficient, InjectionError, Line, Operator,
    PairingShift, PartialInjection, PrefixOperator, PrefixTerm,
};
use crate::wold::{Certificate, Multiplicity, WoldResult};

/// Largest modulus accepted from input; keeps derived moduli (least common
/// multiples, images under slopes) within the supported range.
pub const MAX_INPUT_MODULUS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonError {
    /// JSON pointer of the offending value (`""` is the document root).
    pub pointer: String,
    pub message: String,
    /// Index witnessing an injectivity violation, when that is the cause.
    pub witness: Option<u64>,
}

impl fmt::Display for JsonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "at {at}: {}", self.message)
    }
}

impl std::error::Error for JsonError {}

fn err(pointer: &str, message: impl Into<String>) -> JsonError {
    JsonError {
        pointer: pointer.to_string(),
        message: message.into(),
        witness: None,
    }
}

fn child(pointer: &str, key: impl fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().ok_or_else(|| err(ptr, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value, JsonError> {
    obj.get(key)
        .ok_or_else(|| err(ptr, format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| err(ptr, "expected an array"))
}

fn natural(v: &Value, ptr: &str) -> Result<u64, JsonError> {
    v.as_u64()
        .ok_or_else(|| err(ptr, "expected a nonnegative integer"))
}

fn integer(v: &Value, ptr: &str) -> Result<i64, JsonError> {
    v.as_i64().ok_or_else(|| err(ptr, "expected an integer"))
}

fn naturals(v: Option<&Value>, ptr: &str) -> Result<Vec<u64>, JsonError> {
    match v {
        None => Ok(Vec::new()),
        Some(v) => array(v, ptr)?
            .iter()
            .enumerate()
            .map(|(n, x)| natural(x, &child(ptr, n)))
            .collect(),
    }
}

pub fn parse_index_set(v: &Value, ptr: &str) -> Result<IndexSet, JsonError> {
    let obj = object(v, ptr)?;
    let modulus = natural(field(obj, "mod", ptr)?, &child(ptr, "mod"))?;
    if modulus == 0 || modulus > MAX_INPUT_MODULUS {
        return Err(err(
            &child(ptr, "mod"),
            format!("modulus must be between 1 and {MAX_INPUT_MODULUS}"),
        ));
    }
    let res = naturals(obj.get("res"), &child(ptr, "res"))?;
    let plus = naturals(obj.get("plus"), &child(ptr, "plus"))?;
    let minus = naturals(obj.get("minus"), &child(ptr, "minus"))?;
    for key in obj.keys() {
        if !["mod", "res", "plus", "minus"].contains(&key.as_str()) {
            return Err(err(&child(ptr, key), "unknown field"));
        }
    }
    IndexSet::try_new(modulus, res, plus, minus).map_err(|e| err(ptr, e.to_string()))
}

pub fn index_set_to_json(s: &IndexSet) -> Value {
    json!({"mod": s.modulus(), "res": s.residues(), "plus": s.added(), "minus": s.removed()})
}

fn rational(v: &Value, ptr: &str) -> Result<num_rational::BigRational, JsonError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| err(ptr, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(num_rational::BigRational::from_integer(
            n.as_i64().expect("checked").into(),
        )),
        _ => Err(err(ptr, "expected a rational string \"p\" or \"p/q\"")),
    }
}

pub fn parse_coefficient(v: &Value, ptr: &str) -> Result<Coefficient, JsonError> {
    let obj = object(v, ptr)?;
    let re = rational(field(obj, "re", ptr)?, &child(ptr, "re"))?;
    let im = match obj.get("im") {
        Some(x) => rational(x, &child(ptr, "im"))?,
        None => num_rational::BigRational::from_integer(0.into()),
    };
    Ok(Coefficient::new(re, im))
}

pub fn coefficient_to_json(c: &Coefficient) -> Value {
    json!({"re": rational_to_string(c.re()), "im": rational_to_string(c.im())})
}

fn injection_error(ptr: &str, e: InjectionError) -> JsonError {
    let witness = match e {
        InjectionError::NotIntegral { index, .. } => Some(index),
        InjectionError::DomainOverlap { witness, .. } | InjectionError::ImageOverlap { witness, .. } => {
            Some(witness)
        }
        InjectionError::BadSlope { .. } => None,
    };
    let piece = match e {
        InjectionError::BadSlope { piece } | InjectionError::NotIntegral { piece, .. } => piece,
        InjectionError::DomainOverlap { second, .. } | InjectionError::ImageOverlap { second, .. } => {
            second
        }
    };
    JsonError {
        pointer: child(&child(ptr, "pieces"), piece),
        message: e.to_string(),
        witness,
    }
}

pub fn parse_injection(v: &Value, ptr: &str) -> Result<PartialInjection, JsonError> {
    let obj = object(v, ptr)?;
    let pieces_ptr = child(ptr, "pieces");
    let list = array(field(obj, "pieces", ptr)?, &pieces_ptr)?;
    let mut pieces = Vec::with_capacity(list.len());
    for (n, p) in list.iter().enumerate() {
        let pp = child(&pieces_ptr, n);
        let po = object(p, &pp)?;
        let domain = parse_index_set(field(po, "domain", &pp)?, &child(&pp, "domain"))?;
        let a = integer(field(po, "a", &pp)?, &child(&pp, "a"))?;
        let b = integer(field(po, "b", &pp)?, &child(&pp, "b"))?;
        let d = match po.get("d") {
            Some(x) => integer(x, &child(&pp, "d"))?,
            None => 1,
        };
        if a <= 0 || d <= 0 {
            return Err(injection_error(ptr, InjectionError::BadSlope { piece: n }));
        }
        if a.unsigned_abs() > MAX_INPUT_MODULUS || d.unsigned_abs() > MAX_INPUT_MODULUS {
            return Err(err(&pp, format!("slope terms must not exceed {MAX_INPUT_MODULUS}")));
        }
        pieces.push(AffinePiece::new(domain, Line::new(a as u64, b, d as u64)));
    }
    PartialInjection::validate(pieces).map_err(|e| injection_error(ptr, e))
}

pub fn injection_to_json(f: &PartialInjection) -> Value {
    let pieces: Vec<Value> = f
        .pieces()
        .iter()
        .map(|p| {
            let line = p.line();
            let mut o = json!({"domain": index_set_to_json(p.domain()), "a": line.a(), "b": line.b()});
            if line.d() != 1 {
                o["d"] = json!(line.d());
            }
            o
        })
        .collect();
    json!({ "pieces": pieces })
}

fn parse_terms(v: &Value, ptr: &str) -> Result<Operator, JsonError> {
    let list = array(v, ptr)?;
    let mut terms = Vec::with_capacity(list.len());
    for (n, t) in list.iter().enumerate() {
        let tp = child(ptr, n);
        let to = object(t, &tp)?;
        let coeff = parse_coefficient(field(to, "coeff", &tp)?, &child(&tp, "coeff"))?;
        let map = parse_injection(field(to, "map", &tp)?, &child(&tp, "map"))?;
        terms.push((coeff, map));
    }
    Ok(Operator::from_terms(terms))
}

/// Parses an operator of either tier. `{"terms": [...]}` is exact; an
/// object with `"tier": "prefix"` may add pointwise `"shifts"`.
pub fn parse_operator(v: &Value, ptr: &str) -> Result<Constructed, JsonError> {
    let obj = object(v, ptr)?;
    let exact = parse_terms(field(obj, "terms", ptr)?, &child(ptr, "terms"))?;
    match obj.get("tier").map(|t| t.as_str()) {
        None | Some(Some("exact")) => Ok(Constructed::Exact(exact)),
        Some(Some("prefix")) => {
            let sp = child(ptr, "shifts");
            let list = match obj.get("shifts") {
                Some(s) => array(s, &sp)?.clone(),
                None => Vec::new(),
            };
            let mut shifts = Vec::new();
            for (n, s) in list.iter().enumerate() {
                let p = child(&sp, n);
                let so = object(s, &p)?;
                let coeff = parse_coefficient(field(so, "coeff", &p)?, &child(&p, "coeff"))?;
                let carrier = parse_index_set(field(so, "carrier", &p)?, &child(&p, "carrier"))?;
                let wandering =
                    parse_index_set(field(so, "wandering", &p)?, &child(&p, "wandering"))?;
                let adjoint = match so.get("adjoint") {
                    None => false,
                    Some(b) => b
                        .as_bool()
                        .ok_or_else(|| err(&child(&p, "adjoint"), "expected a boolean"))?,
                };
                let shift =
                    PairingShift::new(carrier, wandering).map_err(|e| err(&p, e.to_string()))?;
                shifts.push(PrefixTerm {
                    coeff,
                    shift,
                    adjoint,
                });
            }
            Ok(Constructed::Prefix(PrefixOperator::new(exact, shifts)))
        }
        _ => Err(err(&child(ptr, "tier"), "expected \"exact\" or \"prefix\"")),
    }
}

/// Parses an exact-tier operator; prefix input is rejected.
pub fn parse_exact_operator(v: &Value, ptr: &str) -> Result<Operator, JsonError> {
    match parse_operator(v, ptr)? {
        Constructed::Exact(op) => Ok(op),
        Constructed::Prefix(_) => Err(err(ptr, "a prefix-tier operator supports only pointwise commands")),
    }
}

pub fn operator_to_json(op: &Operator) -> Value {
    let terms: Vec<Value> = op
        .terms()
        .iter()
        .map(|t| json!({"coeff": coefficient_to_json(t.coeff()), "map": injection_to_json(t.map())}))
        .collect();
    json!({ "terms": terms })
}

pub fn constructed_to_json(c: &Constructed) -> Value {
    match c {
        Constructed::Exact(op) => operator_to_json(op),
        Constructed::Prefix(p) => {
            let mut v = operator_to_json(p.exact_part());
            v["tier"] = json!("prefix");
            v["shifts"] = p
                .shift_terms()
                .iter()
                .map(|t| {
                    json!({
                        "coeff": coefficient_to_json(&t.coeff),
                        "carrier": index_set_to_json(t.shift.carrier()),
                        "wandering": index_set_to_json(t.shift.wandering()),
                        "adjoint": t.adjoint,
                    })
                })
                .collect();
            v
        }
    }
}

/// `{"map": <injection>, "phases": [{"index": i, "phase": <coeff>}]}`;
/// phases default to 1.
pub fn parse_unitary(v: &Value, ptr: &str) -> Result<UnitarySpec, JsonError> {
    let obj = object(v, ptr)?;
    let map = parse_injection(field(obj, "map", ptr)?, &child(ptr, "map"))?;
    let pp = child(ptr, "phases");
    let mut phases = std::collections::BTreeMap::new();
    if let Some(list) = obj.get("phases") {
        for (n, entry) in array(list, &pp)?.iter().enumerate() {
            let ep = child(&pp, n);
            let eo = object(entry, &ep)?;
            let index = natural(field(eo, "index", &ep)?, &child(&ep, "index"))?;
            let phase = parse_coefficient(field(eo, "phase", &ep)?, &child(&ep, "phase"))?;
            if phases.insert(index, phase).is_some() {
                return Err(JsonError {
                    pointer: ep,
                    message: format!("duplicate phase for index {index}"),
                    witness: Some(index),
                });
            }
        }
    }
    UnitarySpec::new(map, phases).map_err(|e| err(ptr, e.to_string()))
}

pub fn unitary_to_json(u: &UnitarySpec) -> Value {
    let phases: Vec<Value> = u
        .phases()
        .iter()
        .map(|(i, c)| json!({"index": i, "phase": coefficient_to_json(c)}))
        .collect();
    json!({"map": injection_to_json(u.map()), "phases": phases})
}

pub fn multiplicity_to_json(m: &Multiplicity) -> Value {
    match m {
        Multiplicity::Finite(n) => json!(n),
        Multiplicity::Infinite => json!("inf"),
        Multiplicity::AtLeast(n) => json!({ "at_least": n }),
    }
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    match c {
        Certificate::Exact => json!("exact"),
        Certificate::Prefix(n) => json!({ "prefix": n }),
    }
}

pub fn wold_to_json(w: &WoldResult) -> Value {
    json!({
        "unitary": index_set_to_json(&w.unitary),
        "shift": index_set_to_json(&w.shift),
        "wandering": index_set_to_json(&w.wandering),
        "multiplicity": multiplicity_to_json(&w.multiplicity),
        "certificate": certificate_to_json(&w.certificate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_round_trip() {
        let v = json!({
            "map": {"pieces": [
                {"domain": {"mod": 4, "res": [0]}, "a": 1, "b": 2},
                {"domain": {"mod": 4, "res": [2]}, "a": 1, "b": -2}
            ]},
            "phases": [{"index": 4, "phase": {"re": "0", "im": "-1"}}]
        });
        let u = parse_unitary(&v, "").unwrap();
        assert_eq!(u.carrier(), &IndexSet::evens());
        assert_eq!(parse_unitary(&unitary_to_json(&u), "").unwrap(), u);
        let bad = json!({"map": {"pieces": []}, "phases": [{"index": 1, "phase": {"re": "1"}}]});
        assert!(parse_unitary(&bad, "").is_err());
    }

    #[test]
    fn operator_round_trip() {
        let s0 = Operator::from_map(PartialInjection::affine(2, 0));
        let a = s0.scale(&Coefficient::from_ratios(2, 3, -1, 2)).add(&s0.adjoint());
        let v = operator_to_json(&a);
        assert_eq!(parse_exact_operator(&v, "").unwrap(), a);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"re\":\"2/3\""));
        assert!(text.contains("\"d\":2"));
    }

    #[test]
    fn cuntz_generator_json() {
        let v: Value = serde_json::from_str(
            r#"{"terms":[{"coeff":{"re":"1","im":"0"},"map":{"pieces":[
                {"domain":{"mod":1,"res":[0],"plus":[],"minus":[]},"a":2,"b":0}]}}]}"#,
        )
        .unwrap();
        let op = parse_exact_operator(&v, "").unwrap();
        assert_eq!(op, Operator::from_map(PartialInjection::affine(2, 0)));
        let zero: Value = serde_json::from_str(r#"{"terms":[]}"#).unwrap();
        assert!(parse_exact_operator(&zero, "").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_pointers() {
        let v: Value = serde_json::from_str(
            r#"{"terms":[{"coeff":{"re":"1"},"map":{"pieces":[
                {"domain":{"mod":1,"res":[0]},"a":2,"b":0},
                {"domain":{"mod":1,"res":[0]},"a":2,"b":0}]}}]}"#,
        )
        .unwrap();
        let e = parse_exact_operator(&v, "").unwrap_err();
        assert_eq!(e.pointer, "/terms/0/map/pieces/1");
        assert_eq!(e.witness, Some(0));
        let bad: Value = serde_json::from_str(r#"{"terms":[{"coeff":{"re":"1.5"}}]}"#).unwrap();
        assert_eq!(parse_exact_operator(&bad, "").unwrap_err().pointer, "/terms/0/coeff/re");
        let missing: Value = serde_json::from_str(r#"{"term":[]}"#).unwrap();
        assert_eq!(parse_exact_operator(&missing, "").unwrap_err().pointer, "");
    }

    #[test]
    fn index_set_shape() {
        let v = index_set_to_json(&IndexSet::finite([0, 2]));
        assert_eq!(v, json!({"mod": 1, "res": [], "plus": [0, 2], "minus": []}));
        assert_eq!(parse_index_set(&v, "").unwrap(), IndexSet::finite([0, 2]));
    }
}
