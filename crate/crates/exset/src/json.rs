//! Exact JSON encodings of scalars and polynomials.
//!
//! - rational: `"p/q"` (the denominator is always written; `"p"` is accepted on input)
//! - Gaussian rational: `["re", "im"]`
//! - π-expression: array of Gaussian rationals, coefficient of `π^k` at index `k`
//! - polynomial terms: `[[e1, ..., em], coefficient]` in canonical term order

use exset_core::poly::{ExpVec, MPoly};
use exset_core::rational::{format_rat, parse_rat};
use exset_core::{GaussRat, PiExpr, Rat};
use serde_json::{json, Value};

/// A decoding failure at a JSON location such as `points[2].coords[0]`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{code} at {path}: {message}")]
pub struct DecodeError {
    pub code: &'static str,
    pub path: String,
    pub message: String,
}

impl DecodeError {
    pub fn new(code: &'static str, path: &str, message: impl Into<String>) -> Self {
        Self { code, path: path.to_string(), message: message.into() }
    }

    pub fn shape(path: &str, expected: &str) -> Self {
        Self::new("BadField", path, format!("expected {expected}"))
    }
}

pub type Decoded<T> = Result<T, DecodeError>;

pub fn rat_to_json(x: &Rat) -> Value {
    Value::String(format_rat(x))
}

pub fn rat_from_json(v: &Value, path: &str) -> Decoded<Rat> {
    let s = v.as_str().ok_or_else(|| DecodeError::new("BadRational", path, "expected a string \"p/q\""))?;
    parse_rat(s).map_err(|e| DecodeError::new("BadRational", path, e.to_string()))
}

pub fn gauss_to_json(z: &GaussRat) -> Value {
    json!([format_rat(&z.re), format_rat(&z.im)])
}

pub fn gauss_from_json(v: &Value, path: &str) -> Decoded<GaussRat> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => {
            Ok(GaussRat::new(rat_from_json(re, &format!("{path}[0]"))?, rat_from_json(im, &format!("{path}[1]"))?))
        }
        _ => Err(DecodeError::new("BadRational", path, "expected a pair [\"re\", \"im\"]")),
    }
}

pub fn point_to_json(z: &[GaussRat]) -> Value {
    Value::Array(z.iter().map(gauss_to_json).collect())
}

pub fn point_from_json(v: &Value, path: &str) -> Decoded<Vec<GaussRat>> {
    let items = v.as_array().ok_or_else(|| DecodeError::shape(path, "an array of coordinates"))?;
    items.iter().enumerate().map(|(i, c)| gauss_from_json(c, &format!("{path}[{i}]"))).collect()
}

pub fn pi_to_json(v: &PiExpr) -> Value {
    Value::Array(v.coeffs().iter().map(gauss_to_json).collect())
}

pub fn pi_from_json(v: &Value, path: &str) -> Decoded<PiExpr> {
    let items = v.as_array().ok_or_else(|| DecodeError::shape(path, "an array of π-coefficients"))?;
    let coeffs = items
        .iter()
        .enumerate()
        .map(|(i, c)| gauss_from_json(c, &format!("{path}[{i}]")))
        .collect::<Decoded<Vec<_>>>()?;
    let value = PiExpr::from_coeffs(coeffs);
    if value.coeffs().len() != items.len() {
        return Err(DecodeError::new("BadField", path, "trailing zero π-coefficients are not canonical"));
    }
    Ok(value)
}

/// Terms with π-free coefficients written as Gaussian pairs.
pub fn gauss_poly_to_json(p: &MPoly) -> Value {
    let terms = p
        .terms()
        .map(|(e, c)| {
            let g = c.as_gauss().expect("π-free coefficient");
            json!([e.0, gauss_to_json(&g)])
        })
        .collect();
    Value::Array(terms)
}

/// Terms with real rational coefficients written as `"p/q"`.
pub fn real_poly_to_json(p: &MPoly) -> Value {
    let terms = p
        .terms()
        .map(|(e, c)| {
            let g = c.as_gauss().expect("π-free coefficient");
            assert!(g.is_real(), "real coefficient expected");
            json!([e.0, rat_to_json(&g.re)])
        })
        .collect();
    Value::Array(terms)
}

pub fn gauss_poly_from_json(v: &Value, arity: usize, path: &str) -> Decoded<MPoly> {
    let items = v.as_array().ok_or_else(|| DecodeError::shape(path, "an array of terms"))?;
    let mut p = MPoly::zero(arity);
    let mut last: Option<ExpVec> = None;
    for (i, t) in items.iter().enumerate() {
        let here = format!("{path}[{i}]");
        let [exps, coeff] = t.as_array().map(Vec::as_slice).unwrap_or_default() else {
            return Err(DecodeError::shape(&here, "a term [exponents, coefficient]"));
        };
        let exps = exps
            .as_array()
            .filter(|e| e.len() == arity)
            .and_then(|e| {
                e.iter().map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok())).collect::<Option<Vec<u32>>>()
            })
            .ok_or_else(|| DecodeError::new("ArityMismatch", &here, format!("expected {arity} exponents")))?;
        let e = ExpVec(exps);
        if last.as_ref().is_some_and(|l| l >= &e) {
            return Err(DecodeError::new("BadField", &here, "terms out of canonical order"));
        }
        let c = gauss_from_json(coeff, &format!("{here}[1]"))?;
        if c.is_zero() {
            return Err(DecodeError::new("BadField", &here, "zero coefficient"));
        }
        p.add_term(e.clone(), &PiExpr::constant(c));
        last = Some(e);
    }
    Ok(p)
}

/// Two-space indented JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
