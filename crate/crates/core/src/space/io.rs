//! Text edge-list format.
//!
//! ```text
//! metricgraph v1 <vertex_count>
//! # comment
//! u v length
//! ```
//!
//! Two structured comments carry the optional fields so that plain readers
//! can ignore them: `#@resolution <h>` and `#@label <vertex> <text>`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{build_graph, Edge, MetricGraph};
use crate::error::{Error, Result};

const MAGIC: &str = "metricgraph";
const VERSION: &str = "v1";

pub fn write_graph(g: &MetricGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION} {}", g.vertex_count());
    if g.resolution() > 0.0 {
        let _ = writeln!(out, "#@resolution {}", g.resolution());
    }
    if let Some(labels) = g.labels() {
        for (i, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "#@label {i} {l}");
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.length);
    }
    out
}

pub fn save_graph(g: &MetricGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_graph(g)).map_err(|e| Error::io(path, e))
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<MetricGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<MetricGraph> {
    let mut vertex_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut resolution = 0.0;
    let mut labels: Vec<(usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#@") {
            let mut toks = rest.splitn(2, char::is_whitespace);
            match toks.next() {
                Some("resolution") => {
                    resolution = field(toks.next().map(str::trim), lineno, "resolution")?;
                }
                Some("label") => {
                    let rest = toks.next().unwrap_or("").trim_start();
                    let mut parts = rest.splitn(2, ' ');
                    let v: usize = field(parts.next(), lineno, "label vertex")?;
                    labels.push((v, parts.next().unwrap_or("").to_string()));
                }
                _ => {}
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match vertex_count {
            None => {
                if toks.next() != Some(MAGIC) || toks.next() != Some(VERSION) {
                    return Err(parse_err(
                        lineno,
                        format!("expected header `{MAGIC} {VERSION} <vertex_count>`"),
                    ));
                }
                vertex_count = Some(field(toks.next(), lineno, "vertex count")?);
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after header"));
                }
            }
            Some(n) => {
                let u: usize = field(toks.next(), lineno, "edge endpoint")?;
                let v: usize = field(toks.next(), lineno, "edge endpoint")?;
                let length: f64 = field(toks.next(), lineno, "edge length")?;
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after edge"));
                }
                if u >= n || v >= n {
                    return Err(parse_err(
                        lineno,
                        format!("edge ({u}, {v}) references a vertex >= {n}"),
                    ));
                }
                edges.push(Edge::new(u, v, length));
            }
        }
    }

    let n = vertex_count.ok_or_else(|| parse_err(1, "missing header"))?;
    let mut g = build_graph(n, edges)?.with_resolution(resolution);
    if !labels.is_empty() {
        let mut all = vec![String::new(); n];
        for (v, l) in labels {
            if v >= n {
                return Err(Error::BadParams(format!("label for vertex {v} >= {n}")));
            }
            all[v] = l;
        }
        g = g.with_labels(all)?;
    }
    Ok(g)
}
