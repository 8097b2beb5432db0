//! Document export and import: versioned JSON envelopes and CSV tables.
//!
//! Every JSON document carries a top-level `"schema": "matlag/1"` key and
//! a `"kind"` naming the payload (`operator`, `weight`, `pair`, `mops`,
//! `verify`, `classification`, `reduce-check`, `selftest`), so exported
//! tables remain self-describing when they feed external analysis.
//! Serialization is deterministic: object keys are emitted in sorted
//! order and floats print in shortest round-trip form.
//!
//! CSV tables use 17 significant digits (`%.16e`) so that every `f64`
//! round-trips losslessly, and complex numbers occupy adjacent
//! `re`,`im` column pairs.  A matrix occupies one row of eight numeric
//! columns in row-major entry order.
//!
//! Import helpers accept either a bare serialized object or any envelope
//! that contains the requested payload under its canonical key, so the
//! output of one command can feed the next without editing.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::classify::Classification;
use crate::cmat::CMat2;
use crate::error::{Error, Result};
use crate::mops::MOPSequence;
use crate::operators::LagOperator;
use crate::reduce::CommutantReport;
use crate::symmetry::SymmetryReport;
use crate::weights::WeightSpec;

/// Document schema version tag.
pub const SCHEMA: &str = "matlag/1";

/// `x` with 17 significant digits, the shortest format that round-trips
/// every double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn envelope(kind: &str, mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), Value::String(SCHEMA.into()));
    body.insert("kind".into(), Value::String(kind.into()));
    Value::Object(body)
}

fn to_map<T: serde::Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        Ok(other) => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
        Err(_) => Map::new(),
    }
}

/// `{"schema": "matlag/1", "kind": "operator", "operator": {...}}`.
pub fn operator_doc(op: &LagOperator) -> Value {
    let mut m = Map::new();
    m.insert("operator".into(), serde_json::to_value(op).unwrap_or(Value::Null));
    envelope("operator", m)
}

/// `{"schema": "matlag/1", "kind": "weight", "weight": {...}}`.
pub fn weight_doc(spec: &WeightSpec) -> Value {
    let mut m = Map::new();
    m.insert("weight".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    envelope("weight", m)
}

/// Operator and weight of one family in a single document.
pub fn pair_doc(op: &LagOperator, spec: &WeightSpec) -> Value {
    let mut m = Map::new();
    m.insert("operator".into(), serde_json::to_value(op).unwrap_or(Value::Null));
    m.insert("weight".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    envelope("pair", m)
}

/// Monic coefficients, Gram matrices, and recurrence of a sequence.
pub fn mops_doc(spec: &WeightSpec, seq: &MOPSequence) -> Value {
    let mut m = Map::new();
    m.insert("weight".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    m.insert("n_max".into(), json!(seq.n_max));
    m.insert("polys".into(), serde_json::to_value(&seq.polys).unwrap_or(Value::Null));
    m.insert("grams".into(), serde_json::to_value(&seq.grams).unwrap_or(Value::Null));
    m.insert("a".into(), serde_json::to_value(&seq.a).unwrap_or(Value::Null));
    m.insert("b".into(), serde_json::to_value(&seq.b).unwrap_or(Value::Null));
    m.insert(
        "orthogonality_residual".into(),
        json!(seq.orthogonality_residual()),
    );
    m.insert("recurrence_residual".into(), json!(seq.recurrence_residual()));
    envelope("mops", m)
}

/// Symmetry verification report for an operator-weight pair.
pub fn verify_doc(
    op: &LagOperator,
    spec: &WeightSpec,
    report: &SymmetryReport,
) -> Value {
    let mut m = to_map(report);
    m.insert("operator".into(), serde_json::to_value(op).unwrap_or(Value::Null));
    m.insert("weight".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    envelope("verify", m)
}

/// Classification verdict with its equivalence witness.
pub fn classification_doc(op: &LagOperator, cls: &Classification) -> Value {
    let mut m = to_map(cls);
    m.insert("operator".into(), serde_json::to_value(op).unwrap_or(Value::Null));
    envelope("classification", m)
}

/// One or both commutant probes for a weight.
pub fn reduce_doc(spec: &WeightSpec, reports: &[CommutantReport]) -> Value {
    let mut m = Map::new();
    m.insert("weight".into(), serde_json::to_value(spec).unwrap_or(Value::Null));
    let enriched: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut rm = to_map(r);
            rm.insert(
                "interpretation".into(),
                Value::String(r.interpretation().into()),
            );
            Value::Object(rm)
        })
        .collect();
    m.insert("reports".into(), Value::Array(enriched));
    envelope("reduce-check", m)
}

/// Pretty-printed JSON (sorted keys; stable across runs).
pub fn to_json_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s
}

/// Write `content` to `path`, or to stdout when `path` is `None`.
///
/// # Errors
///
/// Propagates filesystem errors.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn push_matrix(record: &mut Vec<String>, m: &CMat2) {
    for row in &m.e {
        for x in row {
            record.push(fmt17(x.re));
            record.push(fmt17(x.im));
        }
    }
}

const MATRIX_HEADER: [&str; 8] = [
    "m11_re", "m11_im", "m12_re", "m12_im", "m21_re", "m21_im", "m22_re", "m22_im",
];

/// CSV table of a sequence: one row per matrix.  Columns: `object`
/// (`T` coefficient / `S` Gram / `A` / `B`), degree `n`, coefficient
/// index `k` (empty except for `T`), then the eight re,im entry pairs.
///
/// # Errors
///
/// Propagates CSV formatting errors.
pub fn mops_csv(seq: &MOPSequence) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["object".to_string(), "n".into(), "k".into()];
    header.extend(MATRIX_HEADER.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    let mut row = |object: &str, n: usize, k: Option<usize>, m: &CMat2| -> Result<()> {
        let mut rec = vec![
            object.to_string(),
            n.to_string(),
            k.map(|k| k.to_string()).unwrap_or_default(),
        ];
        push_matrix(&mut rec, m);
        w.write_record(&rec)?;
        Ok(())
    };
    for (n, p) in seq.polys.iter().enumerate() {
        for (k, c) in p.coeffs.iter().enumerate() {
            row("T", n, Some(k), c)?;
        }
    }
    for (n, s) in seq.grams.iter().enumerate() {
        row("S", n, None, s)?;
    }
    for (i, a) in seq.a.iter().enumerate() {
        row("A", i + 1, None, a)?;
    }
    for (n, b) in seq.b.iter().enumerate() {
        row("B", n, None, b)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// CSV dump of `W` over a grid: one row per point with columns `t` and
/// the eight re,im entry pairs.
///
/// # Errors
///
/// Weight evaluation errors; CSV formatting errors.
pub fn weight_grid_csv(spec: &WeightSpec, grid: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(MATRIX_HEADER.iter().map(|s| format!("w{}", &s[1..])));
    w.write_record(&header)?;
    for &t in grid {
        let jet = spec.eval(t)?;
        let mut rec = vec![fmt17(t)];
        push_matrix(&mut rec, &jet.w);
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(Error::from)
}

fn extract<'a>(doc: &'a Value, key: &str) -> Option<&'a Value> {
    match doc {
        Value::Object(m) => {
            if m.contains_key("schema") || m.contains_key("kind") {
                m.get(key)
            } else {
                Some(doc)
            }
        }
        _ => None,
    }
}

/// Read an operator from a JSON file: either a bare `{C, U, V}` object or
/// any envelope with an `"operator"` payload.
///
/// # Errors
///
/// [`Error::InvalidInput`] when the file holds neither form.
pub fn read_operator(path: &Path) -> Result<LagOperator> {
    let doc = read_json(path)?;
    let payload = extract(&doc, "operator").ok_or_else(|| {
        Error::InvalidInput(format!("{}: no operator payload", path.display()))
    })?;
    serde_json::from_value(payload.clone()).map_err(|e| {
        Error::InvalidInput(format!("{}: not an operator: {e}", path.display()))
    })
}

/// Read a weight spec from a JSON file: bare `{"family": ...}` or any
/// envelope with a `"weight"` payload.
///
/// # Errors
///
/// [`Error::InvalidInput`] when the file holds neither form.
pub fn read_weight(path: &Path) -> Result<WeightSpec> {
    let doc = read_json(path)?;
    let payload = extract(&doc, "weight").ok_or_else(|| {
        Error::InvalidInput(format!("{}: no weight payload", path.display()))
    })?;
    serde_json::from_value(payload.clone()).map_err(|e| {
        Error::InvalidInput(format!("{}: not a weight spec: {e}", path.display()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mops::build_by_moments;

    fn f1() -> WeightSpec {
        WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        }
    }

    #[test]
    fn envelopes_carry_schema_and_kind() {
        let spec = f1();
        let op = spec.operator().unwrap();
        let doc = pair_doc(&op, &spec);
        assert_eq!(doc["schema"], SCHEMA);
        assert_eq!(doc["kind"], "pair");
        assert_eq!(doc["weight"]["family"], "F1");
        let seq = build_by_moments(&spec, 2).unwrap();
        let mdoc = mops_doc(&spec, &seq);
        assert_eq!(mdoc["kind"], "mops");
        assert_eq!(mdoc["n_max"], 2);
    }

    #[test]
    fn json_rendering_is_deterministic() {
        let spec = f1();
        let op = spec.operator().unwrap();
        let a = to_json_string(&pair_doc(&op, &spec));
        let b = to_json_string(&pair_doc(&op, &spec));
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn mops_csv_contains_recurrence_anchor_row() {
        // B_0 of the degree-one anchor is [[3, 1/2], [-1, 1/2]].
        let seq = build_by_moments(&f1(), 1).unwrap();
        let csv = mops_csv(&seq).unwrap();
        let b0 = csv
            .lines()
            .find(|l| l.starts_with("B,0,"))
            .expect("B_0 row present");
        let fields: Vec<&str> = b0.split(',').collect();
        let nums: Vec<f64> = fields[3..].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(nums.len(), 8);
        assert!((nums[0] - 3.0).abs() < 1e-10, "{b0}");
        assert!((nums[2] - 0.5).abs() < 1e-10);
        assert!((nums[4] + 1.0).abs() < 1e-10);
        assert!((nums[6] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn csv_floats_round_trip() {
        let x = 0.1234567890123456789;
        let s = fmt17(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(x, back);
        let y = 1.0 / 3.0;
        assert_eq!(y, fmt17(y).parse::<f64>().unwrap());
    }

    #[test]
    fn weight_grid_csv_has_one_row_per_point() {
        let csv = weight_grid_csv(&f1(), &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().next().unwrap().starts_with("t,w11_re"));
    }

    #[test]
    fn operator_and_weight_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let spec = f1();
        let op = spec.operator().unwrap();

        // Envelope form.
        let pair_path = dir.path().join("pair.json");
        write_output(Some(&pair_path), &to_json_string(&pair_doc(&op, &spec))).unwrap();
        let op_back = read_operator(&pair_path).unwrap();
        assert!((op_back.c - op.c).norm_inf() < 1e-15);
        let spec_back = read_weight(&pair_path).unwrap();
        assert_eq!(format!("{spec_back}"), format!("{spec}"));

        // Bare form.
        let bare_path = dir.path().join("op.json");
        write_output(
            Some(&bare_path),
            &serde_json::to_string(&op).unwrap(),
        )
        .unwrap();
        let op_bare = read_operator(&bare_path).unwrap();
        assert!((op_bare.v - op.v).norm_inf() < 1e-15);

        // Wrong payload is a clean error.
        let weight_path = dir.path().join("w.json");
        write_output(Some(&weight_path), &to_json_string(&weight_doc(&spec))).unwrap();
        assert!(read_operator(&weight_path).is_err());
    }

    #[test]
    fn classification_doc_embeds_verdict() {
        let op = LagOperator::family3(4.0).unwrap();
        let cls = crate::classify::classify(&op);
        let doc = classification_doc(&op, &cls);
        assert_eq!(doc["kind"], "classification");
        assert_eq!(doc["verdict"]["kind"], "family3");
    }
}
