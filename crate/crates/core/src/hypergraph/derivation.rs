use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::semiring::{Properties, Value};

use super::{EdgeId, HypergraphError, VertexId, WeightedHypergraph};

/// A derivation tree: an edge applied to derivations of each tail vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub edge: EdgeId,
    pub children: Vec<Arc<Derivation>>,
    /// Number of edge applications, `1 + Σ |child|`.
    pub size: usize,
    pub weight: Value,
}

impl Derivation {
    /// Edges of the nullary leaves, left to right.
    pub fn leaves(&self) -> Vec<EdgeId> {
        if self.children.is_empty() {
            return vec![self.edge];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }
}

/// Total order used for output: size, then edge id, then children.
fn order(a: &Derivation, b: &Derivation) -> Ordering {
    a.size.cmp(&b.size).then(a.edge.cmp(&b.edge)).then_with(|| {
        for (x, y) in a.children.iter().zip(&b.children) {
            let o = order(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn new(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64)])
    }

    fn contains(&self, v: VertexId) -> bool {
        self.0[v / 64] & (1 << (v % 64)) != 0
    }

    fn with(&self, v: VertexId) -> Self {
        let mut s = self.clone();
        s.0[v / 64] |= 1 << (v % 64);
        s
    }
}

type Stream = Arc<Vec<Arc<Derivation>>>;

struct Enumerator<'a> {
    h: &'a WeightedHypergraph,
    prune: bool,
    /// `(vertex, ancestors, budget)` → derivations of size ≤ budget, sorted.
    memo: HashMap<(VertexId, VertexSet, usize), Stream>,
}

impl Enumerator<'_> {
    fn derive(
        &mut self,
        v: VertexId,
        ancestors: &VertexSet,
        budget: usize,
    ) -> Result<Arc<Vec<Arc<Derivation>>>, HypergraphError> {
        let key = (v, ancestors.clone(), budget);
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let mut out = Vec::new();
        if budget >= 1 {
            let inner = if self.prune {
                ancestors.with(v)
            } else {
                ancestors.clone()
            };
            for &e in self.h.backward_star(v) {
                let tail = &self.h.edge(e).tail;
                if self.prune && tail.iter().any(|t| inner.contains(*t)) {
                    continue;
                }
                if tail.len() > budget - 1 {
                    continue;
                }
                let mut partial = Vec::new();
                self.combine(e, tail, 0, budget - 1, &inner, &mut partial, &mut out)?;
            }
        }
        out.sort_by(|a, b| order(a, b));
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// Extends `partial` with derivations of `tail[i..]` within `budget`.
    #[allow(clippy::too_many_arguments)]
    fn combine(
        &mut self,
        e: EdgeId,
        tail: &[VertexId],
        i: usize,
        budget: usize,
        inner: &VertexSet,
        partial: &mut Vec<Arc<Derivation>>,
        out: &mut Vec<Arc<Derivation>>,
    ) -> Result<(), HypergraphError> {
        if i == tail.len() {
            let values: Vec<Value> = partial.iter().map(|d| d.weight.clone()).collect();
            out.push(Arc::new(Derivation {
                edge: e,
                children: partial.clone(),
                size: 1 + partial.iter().map(|d| d.size).sum::<usize>(),
                weight: self.h.apply(e, &values)?,
            }));
            return Ok(());
        }
        // Each remaining tail vertex needs at least one edge.
        let reserve = tail.len() - i - 1;
        let own = budget - reserve;
        let options = self.derive(tail[i], inner, own)?;
        for d in options.iter() {
            partial.push(d.clone());
            self.combine(e, tail, i + 1, budget - d.size, inner, partial, out)?;
            partial.pop();
        }
        Ok(())
    }
}

/// All derivations of `v` with at most `size_bound` edges, ordered by size,
/// then edge id, then children. With `prune_repeats`, derivations in which a
/// vertex repeats along a root-to-leaf path are skipped; these never improve
/// the best weight in a 0-closed semiring, and the result is finite for any
/// bound.
pub fn enumerate_derivations(
    h: &WeightedHypergraph,
    v: VertexId,
    size_bound: usize,
    prune_repeats: bool,
) -> Result<Vec<Arc<Derivation>>, HypergraphError> {
    if v >= h.vertex_count() {
        return Err(HypergraphError::UnknownVertex(v.to_string()));
    }
    // Pruned derivations have at most one edge per vertex on each path, so
    // their size is bounded independently of `size_bound`.
    let bound = if prune_repeats {
        size_bound.min(max_pruned_size(h))
    } else {
        size_bound
    };
    let mut en = Enumerator {
        h,
        prune: prune_repeats,
        memo: HashMap::new(),
    };
    let root = VertexSet::new(h.vertex_count());
    Ok(en.derive(v, &root, bound)?.as_ref().clone())
}

/// Upper bound on the size of a derivation with no repeated vertex on any
/// path: a tree of height at most |V| and branching at most the max arity.
fn max_pruned_size(h: &WeightedHypergraph) -> usize {
    let k = h.max_arity().max(1);
    let mut total: usize = 0;
    let mut level: usize = 1;
    for _ in 0..h.vertex_count() {
        total = total.saturating_add(level);
        level = level.saturating_mul(k);
    }
    total
}

/// `δ(v)`: `⊕` of the weights of all derivations of `v` without a repeated
/// vertex on any path, or `zero()` if there are none.
///
/// Requires a 0-closed semiring; there, every repeated-vertex derivation is
/// dominated by a pruned one.
pub fn best_weight_by_enumeration(
    h: &WeightedHypergraph,
    v: VertexId,
) -> Result<Value, HypergraphError> {
    let spec = h.spec();
    if !spec.has(Properties::ZERO_CLOSED) {
        return Err(HypergraphError::Unsupported(format!(
            "best weight by enumeration needs a 0-closed semiring, not {}",
            spec.header()
        )));
    }
    if v >= h.vertex_count() {
        return Err(HypergraphError::UnknownVertex(v.to_string()));
    }
    let mut memo = HashMap::new();
    best(h, v, &VertexSet::new(h.vertex_count()), &mut memo)
}

/// By distributivity, `⊕` over combinations of child derivations of a `⊗`
/// edge equals `⊗` of the per-child sums.
fn best(
    h: &WeightedHypergraph,
    v: VertexId,
    ancestors: &VertexSet,
    memo: &mut HashMap<(VertexId, VertexSet), Value>,
) -> Result<Value, HypergraphError> {
    let key = (v, ancestors.clone());
    if let Some(x) = memo.get(&key) {
        return Ok(x.clone());
    }
    let spec = h.spec();
    let inner = ancestors.with(v);
    let mut acc = spec.zero();
    for &e in h.backward_star(v) {
        let tail = &h.edge(e).tail;
        if tail.iter().any(|t| inner.contains(*t)) {
            continue;
        }
        let mut values = Vec::with_capacity(tail.len());
        for &t in tail {
            values.push(best(h, t, &inner, memo)?);
        }
        acc = spec.plus(&acc, &h.apply(e, &values)?)?;
    }
    memo.insert(key, acc.clone());
    Ok(acc)
}
