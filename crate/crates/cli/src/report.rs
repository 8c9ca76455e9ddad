//! JSON rendering. Indices are 1-based, integers that fit in i64 are JSON
//! numbers and larger ones are decimal strings, rationals are "a/b" strings
//! and reals are expressions in the input grammar.

use cdim_core::dimension::{Coordinates, GeneratorData, MhReport};
use cdim_core::exactnum::{fmt_rational, Rational, RealElement};
use cdim_core::morphism::{cdim, ClosedGroup};
use cdim_core::qlinalg::MatrixZ;
use cdim_core::ComplexDim;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn rational(q: &Rational) -> Value {
    json!(fmt_rational(q))
}

pub fn real(x: &RealElement) -> Value {
    json!(x.to_string())
}

pub fn reals(xs: &[RealElement]) -> Value {
    Value::Array(xs.iter().map(real).collect())
}

pub fn one_based(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&i| json!(i + 1)).collect())
}

fn key(i: usize) -> String {
    (i + 1).to_string()
}

pub fn matrix(m: &MatrixZ) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints(r)).collect())
}

pub fn dimension(d: ComplexDim) -> Value {
    json!({ "p": d.p, "r": d.r, "text": d.to_string() })
}

/// I_k for each non-basis generator, keyed by 1-based generator number.
pub fn index_sets(rep: &MhReport) -> Value {
    let map: Map<String, Value> = rep
        .generators
        .iter()
        .map(|g| (key(g.generator), one_based(&g.structure.independent)))
        .collect();
    Value::Object(map)
}

fn generator_detail(g: &GeneratorData) -> Value {
    let coords = match &g.coords {
        Coordinates::Exact(v) => reals(v),
        Coordinates::Approximate(v) => json!(v),
    };
    let t: Map<String, Value> = g
        .structure
        .offsets
        .iter()
        .map(|(&j, q)| (key(j), rational(q)))
        .collect();
    let gamma: Map<String, Value> = g
        .structure
        .gamma
        .iter()
        .map(|(&j, row)| (key(j), Value::Array(row.iter().map(rational).collect())))
        .collect();
    let p: Map<String, Value> = g.p_coeffs.iter().map(|(&j, x)| (key(j), int(x))).collect();
    let m: Map<String, Value> = g
        .m_coeffs
        .iter()
        .map(|(&j, row)| (key(j), ints(row)))
        .collect();
    let u_prime: Vec<Value> = g
        .u_prime
        .iter()
        .map(|(j, col)| json!({ "j": j + 1, "column": ints(col) }))
        .collect();
    json!({
        "generator": g.generator + 1,
        "coordinates": coords,
        "I": one_based(&g.structure.independent),
        "t": t,
        "gamma": gamma,
        "d": int(&g.denominator),
        "p_coeffs": p,
        "m_coeffs": m,
        "u_prime": u_prime,
    })
}

pub fn mh_detail(rep: &MhReport) -> Value {
    Value::Array(rep.generators.iter().map(generator_detail).collect())
}

pub fn closed_group(g: &ClosedGroup) -> Value {
    json!({
        "ambient_dim": g.ambient_dim(),
        "subspace": g.e_basis().iter().map(|v| reals(v)).collect::<Vec<_>>(),
        "lattice": g.d_gens().iter().map(|v| reals(v)).collect::<Vec<_>>(),
        "dimension": dimension(cdim(g)),
    })
}

/// Wraps a command's fields with the schema header.
pub fn envelope(command: &str, fields: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(SCHEMA_VERSION));
    out.insert("command".into(), json!(command));
    if let Value::Object(map) = fields {
        out.extend(map);
    }
    Value::Object(out)
}

/// `key: value` lines for `--json false`.
pub fn plain(v: &Value) -> String {
    let mut lines = Vec::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            let text = match val {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            lines.push(format!("{k}: {text}"));
        }
    }
    lines.join("\n")
}
