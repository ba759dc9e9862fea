//! Serialized forms of the core types: digraph JSON (`{"n": …, "edges":
//! [[u,v], …]}`), the plain edge-list text format (`"n m"` header, one
//! `"u v"` line per arc), DOT export, and the "p/q" rendering of exact
//! rationals used by every machine-readable artifact.

use crate::error::{Error, Result};
use crate::graph::{Digraph, UGraph};
use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Serialize, Deserialize)]
struct DigraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

pub fn digraph_to_json(d: &Digraph) -> String {
    serde_json::to_string(&DigraphJson { n: d.n(), edges: d.edges() })
        .expect("digraph serialization cannot fail")
}

pub fn digraph_from_json(text: &str) -> Result<Digraph> {
    let raw: DigraphJson = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("digraph JSON: {e}")))?;
    Digraph::from_edges(raw.n, &raw.edges)
}

/// A forest (or any list of digraphs) as a JSON array of digraph objects.
pub fn digraphs_from_json(text: &str) -> Result<Vec<Digraph>> {
    let raw: Vec<DigraphJson> = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("digraph list JSON: {e}")))?;
    raw.into_iter().map(|r| Digraph::from_edges(r.n, &r.edges)).collect()
}

pub fn digraphs_to_json(ds: &[Digraph]) -> String {
    let raw: Vec<DigraphJson> =
        ds.iter().map(|d| DigraphJson { n: d.n(), edges: d.edges() }).collect();
    serde_json::to_string(&raw).expect("digraph serialization cannot fail")
}

/// Undirected graphs use the same JSON shape; each pair is one edge (loops
/// rejected).
pub fn ugraph_from_json(text: &str) -> Result<UGraph> {
    let raw: DigraphJson = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("graph JSON: {e}")))?;
    UGraph::from_edges(raw.n, &raw.edges)
}

pub fn ugraphs_from_json(text: &str) -> Result<Vec<UGraph>> {
    let raw: Vec<DigraphJson> = serde_json::from_str(text)
        .map_err(|e| Error::format(format!("graph list JSON: {e}")))?;
    raw.into_iter().map(|r| UGraph::from_edges(r.n, &r.edges)).collect()
}

/// Plain text: a `"n m"` header line, then one `"u v"` line per arc.
pub fn digraph_to_edge_list(d: &Digraph) -> String {
    let mut out = format!("{} {}\n", d.n(), d.edge_count());
    for (u, v) in d.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn digraph_from_edge_list(text: &str) -> Result<Digraph> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::format("empty edge list"))?;
    let mut hp = header.split_whitespace();
    let n: usize = hp
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::format("edge-list header must start with the vertex count"))?;
    let m: usize = hp
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::format("edge-list header must give the arc count"))?;
    if hp.next().is_some() {
        return Err(Error::format("edge-list header has trailing tokens"));
    }
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let mut p = line.split_whitespace();
        let (u, v) = match (p.next(), p.next(), p.next()) {
            (Some(u), Some(v), None) => (
                u.parse::<usize>().map_err(|_| Error::format(format!("bad arc line {line:?}")))?,
                v.parse::<usize>().map_err(|_| Error::format(format!("bad arc line {line:?}")))?,
            ),
            _ => return Err(Error::format(format!("bad arc line {line:?}"))),
        };
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::format(format!(
            "edge-list header promises {m} arcs but {} follow",
            edges.len()
        )));
    }
    Digraph::from_edges(n, &edges)
}

/// Accepts either serialized form, sniffing JSON by the leading character.
pub fn digraph_from_text(text: &str) -> Result<Digraph> {
    match text.trim_start().chars().next() {
        Some('{') => digraph_from_json(text),
        _ => digraph_from_edge_list(text),
    }
}

pub fn digraph_to_dot(d: &Digraph, name: &str) -> String {
    let mut out = format!("digraph {name} {{\n");
    for v in 0..d.n() {
        out.push_str(&format!("  {v};\n"));
    }
    for (u, v) in d.edges() {
        out.push_str(&format!("  {u} -> {v};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn ugraph_to_dot(g: &UGraph, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..g.n() {
        out.push_str(&format!("  {v};\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}

/// `"p/q"` with `q` omitted when 1; always the reduced form with the sign
/// on the numerator. This string — never a float — is what JSON artifacts
/// carry for exact values.
pub fn rational_to_string(x: &BigRational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_from_string(s: &str) -> Result<BigRational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p.trim())
        .map_err(|_| Error::format(format!("bad rational numerator in {s:?}")))?;
    let q = BigInt::from_str(q.trim())
        .map_err(|_| Error::format(format!("bad rational denominator in {s:?}")))?;
    if q == BigInt::from(0) {
        return Err(Error::format("rational with zero denominator"));
    }
    Ok(BigRational::new(p, q))
}
