use std::collections::HashMap;
use std::fmt::Write;

use crate::semiring::SemiringSpec;

use super::{EdgeWeight, HypergraphError, VertexId, WeightedHypergraph};

/// Line-oriented text form. Vertex ids are the internal indexes; edges keep
/// their order, so parsing the output gives back an equal hypergraph.
pub fn format_hypergraph(h: &WeightedHypergraph) -> String {
    let mut out = String::new();
    writeln!(out, "semiring {}", h.spec().header()).unwrap();
    for v in h.vertices() {
        writeln!(out, "vertex {v} {}", h.label(v)).unwrap();
    }
    for e in h.edges() {
        match &e.weight {
            EdgeWeight::Constant(c) => {
                writeln!(out, "source {} {}", e.head, h.spec().format_value(c)).unwrap();
            }
            EdgeWeight::Product => {
                write!(out, "edge {} <-", e.head).unwrap();
                for t in &e.tail {
                    write!(out, " {t}").unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Parses the text form. The `semiring` header must precede every `source`
/// line; vertex ids are arbitrary tokens declared before use.
pub fn parse_hypergraph(text: &str) -> Result<WeightedHypergraph, HypergraphError> {
    let mut h: Option<WeightedHypergraph> = None;
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| HypergraphError::Parse { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (keyword, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let rest = rest.trim();
        if keyword == "semiring" {
            if h.is_some() {
                return Err(err("repeated `semiring` header".into()));
            }
            let spec = SemiringSpec::from_header(rest).map_err(|e| err(e.to_string()))?;
            h = Some(WeightedHypergraph::new(spec));
            continue;
        }
        let Some(graph) = h.as_mut() else {
            return Err(err("expected a `semiring` header first".into()));
        };
        let lookup = |ids: &HashMap<String, VertexId>, tok: &str| {
            ids.get(tok)
                .copied()
                .ok_or_else(|| err(format!("unknown vertex id `{tok}`")))
        };
        match keyword {
            "vertex" => {
                let (id, label) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("expected `vertex <id> <label>`".into()))?;
                if ids.contains_key(id) {
                    return Err(err(format!("duplicate vertex id `{id}`")));
                }
                let v = graph
                    .add_vertex(label.trim())
                    .map_err(|e| err(e.to_string()))?;
                ids.insert(id.to_string(), v);
            }
            "source" => {
                let (id, lit) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("expected `source <id> <value>`".into()))?;
                let v = lookup(&ids, id)?;
                let value = graph
                    .spec()
                    .parse_value(lit.trim())
                    .map_err(|e| err(e.to_string()))?;
                graph.add_source(v, value).map_err(|e| err(e.to_string()))?;
            }
            "edge" => {
                let mut toks = rest.split_whitespace();
                let head = toks
                    .next()
                    .ok_or_else(|| err("expected `edge <head> <- <tail>...`".into()))?;
                if toks.next() != Some("<-") {
                    return Err(err("expected `<-` after the head".into()));
                }
                let head = lookup(&ids, head)?;
                let tail = toks
                    .map(|t| lookup(&ids, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if tail.is_empty() {
                    return Err(err("an edge needs at least one tail vertex".into()));
                }
                graph.add_edge(head, tail).map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    h.ok_or(HypergraphError::Parse {
        line: 0,
        message: "missing `semiring` header".into(),
    })
}
