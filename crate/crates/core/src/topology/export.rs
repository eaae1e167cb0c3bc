//! JSON and SVG renderings. Positions are exact `p/q` strings in JSON; SVG
//! coordinates are truncated decimals, so equal inputs give equal bytes.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde_json::{json, Value};

use super::complex::{Complex, Edge, Segment, Vertex};
use super::subdivision::TerminatingSubdivision;
use crate::error::{Error, Result};
use crate::ternary::{format_rational, parse_rational, pow3_int, Ternary};
use crate::word::ProcessId;

fn pos(t: &Ternary) -> String {
    format_rational(&t.to_rational())
}

fn parse_pos(s: &str) -> Result<Ternary> {
    let q = parse_rational(s)?;
    Ternary::from_rational(&q)
        .ok_or_else(|| Error::domain(format!("{s} is not a ternary rational")))
}

fn color(c: ProcessId) -> &'static str {
    match c {
        ProcessId::White => "white",
        ProcessId::Black => "black",
    }
}

pub fn complex_to_json(c: &Complex) -> Value {
    let vertices: Vec<Value> = c
        .vertices()
        .iter()
        .map(|v| json!({"segment": v.segment.label(), "position": pos(&v.position), "color": color(v.color)}))
        .collect();
    let edges: Vec<Value> = c
        .edges
        .iter()
        .map(|e| {
            json!({"segment": e.segment.label(), "lo": pos(&e.lo), "hi": pos(&e.hi), "level": e.level})
        })
        .collect();
    let accumulation: Vec<Value> = c
        .accumulation
        .iter()
        .map(|(s, p)| json!({"segment": s.label(), "point": format_rational(p)}))
        .collect();
    json!({
        "schema_version": crate::SCHEMA_VERSION,
        "kind": "complex",
        "vertices": vertices,
        "edges": edges,
        "accumulation": accumulation,
    })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::parse(0, format!("missing field \"{key}\"")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| Error::parse(0, format!("field \"{key}\" must be a string")))
}

fn segment_field(v: &Value) -> Result<Segment> {
    let s = str_field(v, "segment")?;
    Segment::parse(s).ok_or_else(|| Error::parse(0, format!("unknown segment \"{s}\"")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| Error::parse(0, format!("field \"{key}\" must be an array")))
}

/// Inverse of [`complex_to_json`]. Vertices are recomputed from the edges and
/// checked against the listed ones.
pub fn complex_from_json(v: &Value) -> Result<Complex> {
    if str_field(v, "kind")? != "complex" {
        return Err(Error::parse(0, "not a complex document"));
    }
    let mut c = Complex::default();
    for e in array(v, "edges")? {
        let level = match field(e, "level")? {
            Value::Null => None,
            l => Some(
                l.as_u64()
                    .ok_or_else(|| Error::parse(0, "level must be a natural number"))?
                    as usize,
            ),
        };
        c.edges.insert(Edge {
            segment: segment_field(e)?,
            lo: parse_pos(str_field(e, "lo")?)?,
            hi: parse_pos(str_field(e, "hi")?)?,
            level,
        });
    }
    for a in array(v, "accumulation")? {
        c.accumulation
            .insert((segment_field(a)?, parse_rational(str_field(a, "point")?)?));
    }
    let listed: Vec<Vertex> = array(v, "vertices")?
        .iter()
        .map(|x| Ok(Vertex::canonical(segment_field(x)?, parse_pos(str_field(x, "position")?)?)))
        .collect::<Result<_>>()?;
    if listed != c.vertices().into_iter().collect::<Vec<_>>() {
        return Err(Error::domain("vertex list does not match the edges"));
    }
    Ok(c)
}

pub fn subdivision_to_json(ts: &TerminatingSubdivision) -> Value {
    serde_json::to_value(ts.doc()).expect("serializable")
}

/// `a + t·(b - a)` as a decimal with three digits.
fn lerp(t: &Ternary, a: i64, b: i64) -> String {
    let e = t.exponent();
    let n = t.numerator() * BigInt::from(b - a) + BigInt::from(a) * pow3_int(e);
    Ternary::new(n, e).to_decimal(1, 3)
}

/// End points of a segment in the drawing: white corner, black corner.
fn frame(s: Segment) -> ((i64, i64), (i64, i64)) {
    let w = |i: u8| if i == 0 { (100, 100) } else { (900, 900) };
    let b = |i: u8| if i == 0 { (900, 100) } else { (100, 900) };
    match s {
        Segment::Unit => ((50, 500), (950, 500)),
        Segment::Square { iw, ib } => (w(iw), b(ib)),
    }
}

fn point(s: Segment, t: &Ternary) -> (String, String) {
    let ((x0, y0), (x1, y1)) = frame(s);
    (lerp(t, x0, x1), lerp(t, y0, y1))
}

const HEADER: &str = r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000">"#;

fn draw_edge(out: &mut String, e: &Edge, stroke: &str, width: u32, dy: i64) {
    let (x1, y1) = point(e.segment, &e.lo);
    let (x2, y2) = point(e.segment, &e.hi);
    let _ = writeln!(
        out,
        r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" transform="translate(0 {dy})" stroke="{stroke}" stroke-width="{width}"/>"#
    );
}

fn draw_vertex(out: &mut String, v: &Vertex, dy: i64) {
    let (x, y) = point(v.segment, &v.position);
    let fill = match v.color {
        ProcessId::White => "white",
        ProcessId::Black => "black",
    };
    let _ = writeln!(
        out,
        r#"<circle cx="{x}" cy="{y}" r="4" transform="translate(0 {dy})" fill="{fill}" stroke="black" stroke-width="1"/>"#
    );
}

/// Draws a complex: the unit segment horizontally, the square with white
/// corners W0 top-left and W1 bottom-right, black corners B0 top-right and
/// B1 bottom-left. Stable (level-tagged) edges are thick.
pub fn complex_to_svg(c: &Complex) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let legend = if c.edges.iter().any(|e| e.segment != Segment::Unit) {
        "input square: white corners W0 top-left, W1 bottom-right; black corners B0 top-right, B1 bottom-left"
    } else {
        "unit segment: white corner 0 left, black corner 1 right"
    };
    let _ = writeln!(out, r#"<text x="20" y="30" font-size="16">{legend}</text>"#);
    for e in &c.edges {
        let width = if e.level.is_some() { 3 } else { 1 };
        draw_edge(&mut out, e, "black", width, 0);
    }
    for v in c.vertices() {
        draw_vertex(&mut out, &v, 0);
    }
    out.push_str("</svg>\n");
    out
}

/// One row per level `1..=r`, showing `K_k`; edges appearing at level `k`
/// are drawn red on row `k`.
pub fn subdivision_to_svg(ts: &TerminatingSubdivision, r: usize) -> Result<String> {
    if r == 0 || r > ts.depth() {
        return Err(Error::Resource(format!(
            "cannot draw {r} levels of a subdivision materialized to {}",
            ts.depth()
        )));
    }
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(
        out,
        r#"<text x="20" y="30" font-size="16">stable edges by level; red at first appearance</text>"#
    );
    let step = if r > 1 { 800 / (r as i64 - 1) } else { 0 };
    for k in 1..=r {
        let dy = 100 + step * (k as i64 - 1) - 500;
        let _ = writeln!(
            out,
            r#"<text x="10" y="{}" font-size="14">{k}</text>"#,
            dy + 505
        );
        let base = Edge::new(Segment::Unit, Ternary::zero(), Ternary::one());
        draw_edge(&mut out, &base, "lightgray", 1, dy);
        let complex = ts.complex(k);
        for e in &complex.edges {
            let stroke = if e.level == Some(k) { "red" } else { "black" };
            draw_edge(&mut out, e, stroke, 3, dy);
        }
        for v in complex.vertices() {
            draw_vertex(&mut out, &v, dy);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
