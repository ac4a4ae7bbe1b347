use std::collections::HashMap;

use crate::hypergraph::{HypergraphError, VertexId, WeightedHypergraph};
use crate::semiring::SemiringSpec;

struct AndNode {
    line: usize,
    heads: Vec<String>,
    children: Vec<String>,
}

/// Imports an AND/OR graph: OR nodes become vertices, AND nodes hyperedges,
/// and `leaf` annotations nullary edges.
///
/// An AND node may list another AND node among its children. Such a child
/// gets an auxiliary vertex `and:<id>` fed by one edge over its own
/// children. An AND id repeated with a different head adds one edge per head;
/// its child list must be the same each time.
pub fn parse_andor(text: &str) -> Result<WeightedHypergraph, HypergraphError> {
    let mut spec = None;
    let mut ors: Vec<(usize, String)> = Vec::new();
    let mut ands: Vec<(String, AndNode)> = Vec::new();
    let mut leaves: Vec<(usize, String, String)> = Vec::new();
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
        match keyword {
            "semiring" => {
                if spec.is_some() {
                    return Err(err("repeated `semiring` header".into()));
                }
                spec = Some(SemiringSpec::from_header(rest).map_err(|e| err(e.to_string()))?);
            }
            "or" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(err("expected `or <id>`".into()));
                }
                ors.push((line, rest.to_string()));
            }
            "and" => {
                let shape = || err("expected `and <id> -> <or-head> : <child>...`".into());
                let (id, rest) = rest.split_once("->").ok_or_else(shape)?;
                let (head, children) = rest.split_once(':').ok_or_else(shape)?;
                let (id, head) = (id.trim(), head.trim());
                if id.is_empty() || head.is_empty() || head.contains(char::is_whitespace) {
                    return Err(shape());
                }
                let children: Vec<String> =
                    children.split_whitespace().map(str::to_string).collect();
                if children.is_empty() {
                    return Err(err(format!("AND node `{id}` has no children; use `leaf`")));
                }
                match ands.iter_mut().find(|(a, _)| a == id) {
                    Some((_, node)) if node.children != children => {
                        return Err(err(format!(
                            "AND node `{id}` redefined with other children"
                        )));
                    }
                    Some((_, node)) => node.heads.push(head.to_string()),
                    None => ands.push((
                        id.to_string(),
                        AndNode {
                            line,
                            heads: vec![head.to_string()],
                            children,
                        },
                    )),
                }
            }
            "leaf" => {
                let (id, lit) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("expected `leaf <or-id> <value>`".into()))?;
                leaves.push((line, id.to_string(), lit.trim().to_string()));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let spec = spec.ok_or(HypergraphError::Parse {
        line: 0,
        message: "missing `semiring` header".into(),
    })?;
    let mut h = WeightedHypergraph::new(spec);
    let mut or_ids: HashMap<&str, VertexId> = HashMap::new();
    for (line, id) in &ors {
        if or_ids.contains_key(id.as_str()) {
            return Err(HypergraphError::Parse {
                line: *line,
                message: format!("duplicate OR node `{id}`"),
            });
        }
        or_ids.insert(id, h.add_vertex(id.clone())?);
    }
    let and_index: HashMap<&str, usize> = ands
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();

    // Auxiliary vertices for AND nodes used as children.
    let mut aux: HashMap<usize, VertexId> = HashMap::new();
    for (_, node) in &ands {
        for c in &node.children {
            if !or_ids.contains_key(c.as_str()) {
                if let Some(&i) = and_index.get(c.as_str()) {
                    if let std::collections::hash_map::Entry::Vacant(slot) = aux.entry(i) {
                        slot.insert(h.add_vertex(format!("and:{c}"))?);
                    }
                }
            }
        }
    }
    let resolve = |line: usize, tok: &str| -> Result<VertexId, HypergraphError> {
        if let Some(&v) = or_ids.get(tok) {
            return Ok(v);
        }
        and_index
            .get(tok)
            .and_then(|i| aux.get(i))
            .copied()
            .ok_or_else(|| HypergraphError::Parse {
                line,
                message: format!("unknown node `{tok}`"),
            })
    };
    let mut aux_order: Vec<(&usize, &VertexId)> = aux.iter().collect();
    aux_order.sort();
    for (_, node) in &ands {
        let tail = node
            .children
            .iter()
            .map(|c| resolve(node.line, c))
            .collect::<Result<Vec<_>, _>>()?;
        for head in &node.heads {
            let v = or_ids
                .get(head.as_str())
                .copied()
                .ok_or_else(|| HypergraphError::Parse {
                    line: node.line,
                    message: format!("head `{head}` is not an OR node"),
                })?;
            h.add_edge(v, tail.clone())?;
        }
    }
    for (&i, &v) in aux_order {
        let node = &ands[i].1;
        let tail = node
            .children
            .iter()
            .map(|c| resolve(node.line, c))
            .collect::<Result<Vec<_>, _>>()?;
        h.add_edge(v, tail)?;
    }
    for (line, id, lit) in &leaves {
        let v = or_ids
            .get(id.as_str())
            .copied()
            .ok_or_else(|| HypergraphError::Parse {
                line: *line,
                message: format!("unknown OR node `{id}`"),
            })?;
        let value = h
            .spec()
            .parse_value(lit)
            .map_err(|e| HypergraphError::Parse {
                line: *line,
                message: e.to_string(),
            })?;
        h.add_source(v, value).map_err(|e| HypergraphError::Parse {
            line: *line,
            message: e.to_string(),
        })?;
    }
    Ok(h)
}
