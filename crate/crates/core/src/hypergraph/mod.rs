//! Weighted hypergraphs and derivations.
//!
//! Every edge is either nullary with a constant weight (a source) or has a
//! non-empty tail and weight `⊗` of its tail values.

mod derivation;
mod text;

use std::collections::HashMap;

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::frontend::{AnnotatedFact, Fact, Program};
use crate::grounding::{derivable_atoms, Grounder, GroundingError};
use crate::semiring::{SemiringError, SemiringSpec, Value};

pub use derivation::{best_weight_by_enumeration, enumerate_derivations, Derivation};
pub use text::{format_hypergraph, parse_hypergraph};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("vertex `{0}` already has a nullary edge")]
    DuplicateSource(String),
    #[error("edge into `{0}` has an empty tail")]
    EmptyTail(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeWeight {
    /// `⊗` of the tail values.
    Product,
    /// Constant of a nullary edge.
    Constant(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub head: VertexId,
    pub tail: Vec<VertexId>,
    pub weight: EdgeWeight,
}

impl Hyperedge {
    pub fn arity(&self) -> usize {
        self.tail.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    spec: SemiringSpec,
    labels: Vec<String>,
    by_label: HashMap<String, VertexId>,
    edges: Vec<Hyperedge>,
    /// Incoming edges per vertex, in edge order.
    backward: Vec<Vec<EdgeId>>,
    source: Vec<Option<EdgeId>>,
}

impl WeightedHypergraph {
    pub fn new(spec: SemiringSpec) -> Self {
        WeightedHypergraph {
            spec,
            labels: Vec::new(),
            by_label: HashMap::new(),
            edges: Vec::new(),
            backward: Vec::new(),
            source: Vec::new(),
        }
    }

    pub fn spec(&self) -> &SemiringSpec {
        &self.spec
    }

    /// Adds a vertex; labels are unique.
    pub fn add_vertex(&mut self, label: impl Into<String>) -> Result<VertexId, HypergraphError> {
        let label = label.into();
        if self.by_label.contains_key(&label) {
            return Err(HypergraphError::DuplicateVertex(label));
        }
        let id = self.labels.len();
        self.by_label.insert(label.clone(), id);
        self.labels.push(label);
        self.backward.push(Vec::new());
        self.source.push(None);
        Ok(id)
    }

    fn check(&self, v: VertexId) -> Result<(), HypergraphError> {
        if v < self.labels.len() {
            Ok(())
        } else {
            Err(HypergraphError::UnknownVertex(v.to_string()))
        }
    }

    /// Adds the nullary edge of `v` with weight `value`.
    pub fn add_source(&mut self, v: VertexId, value: Value) -> Result<EdgeId, HypergraphError> {
        self.check(v)?;
        if !self.spec.contains(&value) {
            return Err(SemiringError::Mixed {
                semiring: self.spec.header(),
                found: format!("{value:?}"),
            }
            .into());
        }
        if self.source[v].is_some() {
            return Err(HypergraphError::DuplicateSource(self.labels[v].clone()));
        }
        let id = self.push(Hyperedge {
            head: v,
            tail: Vec::new(),
            weight: EdgeWeight::Constant(value),
        });
        self.source[v] = Some(id);
        Ok(id)
    }

    /// Adds a `⊗` edge `head ← tail`.
    pub fn add_edge(
        &mut self,
        head: VertexId,
        tail: Vec<VertexId>,
    ) -> Result<EdgeId, HypergraphError> {
        self.check(head)?;
        for &t in &tail {
            self.check(t)?;
        }
        if tail.is_empty() {
            return Err(HypergraphError::EmptyTail(self.labels[head].clone()));
        }
        Ok(self.push(Hyperedge {
            head,
            tail,
            weight: EdgeWeight::Product,
        }))
    }

    fn push(&mut self, e: Hyperedge) -> EdgeId {
        let id = self.edges.len();
        self.backward[e.head].push(id);
        self.edges.push(e);
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.by_label.get(label).copied()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Hyperedge {
        &self.edges[e]
    }

    /// Edges whose head is `v`.
    pub fn backward_star(&self, v: VertexId) -> &[EdgeId] {
        &self.backward[v]
    }

    pub fn source_weight(&self, v: VertexId) -> Option<&Value> {
        self.source[v].map(|e| match &self.edges[e].weight {
            EdgeWeight::Constant(c) => c,
            EdgeWeight::Product => unreachable!("sources are nullary"),
        })
    }

    pub fn max_arity(&self) -> usize {
        self.edges.iter().map(Hyperedge::arity).max().unwrap_or(0)
    }

    /// Applies the weight function of `e` to values of its tail.
    pub fn apply(&self, e: EdgeId, tail_values: &[Value]) -> Result<Value, SemiringError> {
        match &self.edges[e].weight {
            EdgeWeight::Constant(c) => Ok(c.clone()),
            EdgeWeight::Product => self.spec.product(tail_values),
        }
    }

    /// The directed graph with an arc `u → h(e)` for every `u` in `T(e)`.
    pub fn graph_projection(&self) -> DiGraph<VertexId, ()> {
        let mut g = DiGraph::with_capacity(self.labels.len(), self.edges.len());
        let nodes: Vec<_> = self.vertices().map(|v| g.add_node(v)).collect();
        for e in &self.edges {
            for &t in &e.tail {
                g.update_edge(nodes[t], nodes[e.head], ());
            }
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        !is_cyclic_directed(&self.graph_projection())
    }
}

/// Encodes the grounding of `program` over `edb` as a hypergraph.
///
/// Vertices are the derivable atoms, labelled by their fact text, in the
/// order boolean saturation first reaches them. Each EDB fact contributes a
/// nullary edge weighted by its annotation; each rule instantiation over
/// derivable atoms contributes a `⊗` edge.
pub fn from_program(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<WeightedHypergraph, HypergraphError> {
    let atoms = derivable_atoms(program, edb, spec)?;
    let mut h = WeightedHypergraph::new(spec.clone());
    for f in &atoms {
        h.add_vertex(f.to_string())?;
    }
    let mut g = Grounder::new(program, spec.clone())?;
    g.load_edb(edb)?;
    let mut sources: Vec<(Fact, Value)> = Vec::new();
    let mut seen: HashMap<&Fact, usize> = HashMap::new();
    for f in edb {
        match seen.get(&f.fact) {
            Some(&i) => sources[i].1 = spec.plus(&sources[i].1, &f.annotation)?,
            None => {
                seen.insert(&f.fact, sources.len());
                sources.push((f.fact.clone(), f.annotation.clone()));
            }
        }
    }
    for (fact, value) in sources {
        if let Some(v) = h.vertex(&fact.to_string()) {
            h.add_source(v, value)?;
        }
    }
    for f in &atoms {
        let id = g.intern(f).expect("derivable atoms are declared");
        if !g.store().is_settled(id) {
            g.set_value(id, spec.one());
            g.settle(id);
        }
    }
    for r in 0..g.rule_count() {
        for inst in g.instantiate(r, None)? {
            let head = h
                .vertex(&g.head_fact(&inst).to_string())
                .expect("heads are derivable");
            let tail = inst
                .body
                .iter()
                .map(|b| h.vertex(&g.store().fact(*b).to_string()).expect("settled"))
                .collect();
            h.add_edge(head, tail)?;
        }
    }
    Ok(h)
}
