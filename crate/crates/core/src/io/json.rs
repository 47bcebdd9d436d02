//! JSON form of a [`CoordinateSet`].
//!
//! Floats are always written with 17 significant digits so that a document
//! read back reproduces every field bit for bit.

use std::io;

use num_complex::Complex64;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use super::coords::{CoordinateSet, ThreeQubitPayload, TwoQubitPayload};
use crate::density::BlochPoint;
use crate::error::{Error, ParseError, Result};
use crate::gsd::ComplexConcurrenceSet;
use crate::su2::LocalFrame;

pub const SCHEMA_VERSION: u64 = 1;

const FIELDS: [&str; 8] = [
    "schema_version",
    "num_qubits",
    "bloch",
    "frames",
    "lambda",
    "alpha",
    "concurrences",
    "gauge_notes",
];

struct RoundTripFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for RoundTripFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-print any JSON value with round-trip float formatting.
pub fn write_json_value(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter(PrettyFormatter::new()));
    serde::Serialize::serialize(value, &mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn coordinate_value(cs: &CoordinateSet) -> Value {
    let (lambda, alpha, concurrences): (Vec<f64>, Vec<f64>, Map<String, Value>) = match (cs.two_q, cs.three_q) {
        (Some(p), _) => (
            vec![p.lambda0, p.lambda1],
            vec![p.alpha],
            [("c".to_string(), complex_value(p.concurrence))].into_iter().collect(),
        ),
        (_, Some(p)) => {
            let c = p.concurrences;
            (
                p.lambda.to_vec(),
                p.alpha.to_vec(),
                [("c12", c.c12), ("c13", c.c13), ("c23", c.c23), ("c123", c.c123)]
                    .into_iter()
                    .map(|(k, z)| (k.to_string(), complex_value(z)))
                    .collect(),
            )
        }
        _ => (Vec::new(), Vec::new(), Map::new()),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "num_qubits": cs.num_qubits,
        "bloch": cs.bloch.iter().map(|b| b.as_array().to_vec()).collect::<Vec<_>>(),
        "frames": cs.frames.iter().map(|f| vec![f.phi, f.theta]).collect::<Vec<_>>(),
        "lambda": lambda,
        "alpha": alpha,
        "concurrences": concurrences,
        "gauge_notes": cs.gauge_notes,
    })
}

pub fn to_json(cs: &CoordinateSet) -> String {
    write_json_value(&coordinate_value(cs))
}

fn position_of(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    let rest = &text[start.min(text.len())..];
    start
        + rest
            .char_indices()
            .nth(column.saturating_sub(1))
            .map_or(rest.len(), |(i, _)| i)
}

fn numbers(field: &str, v: &Value, len: Option<usize>) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(field, "expected an array of numbers"))?;
    if let Some(n) = len {
        if arr.len() != n {
            return Err(Error::schema(
                field,
                format!("expected {n} entries, found {}", arr.len()),
            ));
        }
    }
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::schema(field, format!("`{x}` is not a number")))
        })
        .collect()
}

fn rows(field: &str, v: &Value, width: usize) -> Result<Vec<Vec<f64>>> {
    v.as_array()
        .ok_or_else(|| Error::schema(field, "expected an array"))?
        .iter()
        .map(|row| numbers(field, row, Some(width)))
        .collect()
}

fn complex_field(map: &Map<String, Value>, key: &str) -> Result<Complex64> {
    let field = format!("concurrences.{key}");
    let v = map.get(key).ok_or_else(|| Error::schema(field.as_str(), "missing"))?;
    let p = numbers(&field, v, Some(2))?;
    Ok(Complex64::new(p[0], p[1]))
}

fn read_payload(obj: &Map<String, Value>) -> Result<CoordinateSet> {
    if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(Error::schema(k.as_str(), "unknown field"));
    }
    let get = |k: &str| obj.get(k).ok_or_else(|| Error::schema(k, "missing"));

    let version = get("schema_version")?
        .as_u64()
        .ok_or_else(|| Error::schema("schema_version", "expected an integer"))?;
    if version != SCHEMA_VERSION {
        return Err(Error::schema(
            "schema_version",
            format!("unsupported version {version}"),
        ));
    }
    let n = get("num_qubits")?
        .as_u64()
        .filter(|n| (1..=3).contains(n))
        .ok_or_else(|| Error::schema("num_qubits", "expected 1, 2 or 3"))? as usize;

    let bloch = rows("bloch", get("bloch")?, 3)?
        .into_iter()
        .map(|r| BlochPoint::new(r[0], r[1], r[2]))
        .collect();
    let frames = rows("frames", get("frames")?, 2)?
        .into_iter()
        .map(|r| LocalFrame::new(r[0], r[1]))
        .collect();

    let conc = get("concurrences")?
        .as_object()
        .ok_or_else(|| Error::schema("concurrences", "expected an object"))?;
    let lambda_len = [0, 0, 2, 5][n];
    let alpha_len = [0, 0, 1, 4][n];
    let lambda = numbers("lambda", get("lambda")?, Some(lambda_len))?;
    let alpha = numbers("alpha", get("alpha")?, Some(alpha_len))?;
    let keys: &[&str] = match n {
        1 => &[],
        2 => &["c"],
        _ => &["c12", "c13", "c23", "c123"],
    };
    if let Some(k) = conc.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(Error::schema(format!("concurrences.{k}"), "unexpected key"));
    }

    let (two_q, three_q) = match n {
        2 => (
            Some(TwoQubitPayload {
                lambda0: lambda[0],
                lambda1: lambda[1],
                alpha: alpha[0],
                concurrence: complex_field(conc, "c")?,
            }),
            None,
        ),
        3 => (
            None,
            Some(ThreeQubitPayload {
                lambda: [lambda[0], lambda[1], lambda[2], lambda[3], lambda[4]],
                alpha: [alpha[0], alpha[1], alpha[2], alpha[3]],
                concurrences: ComplexConcurrenceSet {
                    c12: complex_field(conc, "c12")?,
                    c13: complex_field(conc, "c13")?,
                    c23: complex_field(conc, "c23")?,
                    c123: complex_field(conc, "c123")?,
                },
            }),
        ),
        _ => (None, None),
    };

    let gauge_notes = get("gauge_notes")?
        .as_array()
        .ok_or_else(|| Error::schema("gauge_notes", "expected an array of strings"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema("gauge_notes", format!("`{v}` is not a string")))
        })
        .collect::<Result<Vec<_>>>()?;

    let cs = CoordinateSet {
        num_qubits: n,
        bloch,
        frames,
        two_q,
        three_q,
        gauge_notes,
    };
    cs.validate()?;
    Ok(cs)
}

/// Parse a coordinate document already decoded into a JSON value.
pub fn from_json_value(value: &Value) -> Result<CoordinateSet> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected a JSON object"))?;
    read_payload(obj)
}

/// Parse a coordinate document. Malformed JSON gives [`Error::Parse`]; a
/// well-formed document with bad contents gives [`Error::Schema`].
pub fn from_json(text: &str) -> Result<CoordinateSet> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        let pos = position_of(text, e.line(), e.column());
        Error::Parse(ParseError {
            position: pos,
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
            expected: Vec::new(),
        })
    })?;
    from_json_value(&value)
}
