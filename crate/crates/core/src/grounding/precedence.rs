use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::frontend::Program;

/// Dependency graph over IDB relations: `(r, h)` whenever `r` occurs in the
/// body of a rule with head `h`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
}

/// Strongly connected components of a precedence graph, listed so that no
/// edge leads from a later component to an earlier one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stratification {
    pub components: Vec<BTreeSet<String>>,
}

impl Stratification {
    /// Index of the component holding `relation`.
    pub fn stratum_of(&self, relation: &str) -> Option<usize> {
        self.components.iter().position(|c| c.contains(relation))
    }
}

pub fn precedence_graph(program: &Program) -> PrecedenceGraph {
    let nodes: BTreeSet<String> = program.idb_relations().map(|d| d.name.clone()).collect();
    let mut edges = BTreeSet::new();
    for rule in &program.rules {
        for atom in &rule.body {
            if nodes.contains(&atom.relation) && nodes.contains(&rule.head.relation) {
                edges.insert((atom.relation.clone(), rule.head.relation.clone()));
            }
        }
    }
    PrecedenceGraph { nodes, edges }
}

/// SCCs in topological order of the condensation. Among components that are
/// ready at the same time, the one whose least relation name is smallest
/// comes first.
pub fn stratify(g: &PrecedenceGraph) -> Stratification {
    let mut graph = DiGraph::<&str, ()>::new();
    let index: BTreeMap<&str, _> = g
        .nodes
        .iter()
        .map(|n| (n.as_str(), graph.add_node(n.as_str())))
        .collect();
    for (a, b) in &g.edges {
        if let (Some(&x), Some(&y)) = (index.get(a.as_str()), index.get(b.as_str())) {
            graph.add_edge(x, y, ());
        }
    }
    let sccs = tarjan_scc(&graph);
    let mut comp_of = vec![0usize; graph.node_count()];
    let mut components: Vec<BTreeSet<String>> = Vec::with_capacity(sccs.len());
    for (c, scc) in sccs.iter().enumerate() {
        for &n in scc {
            comp_of[n.index()] = c;
        }
        components.push(scc.iter().map(|&n| graph[n].to_string()).collect());
    }

    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); components.len()];
    let mut indegree = vec![0usize; components.len()];
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).expect("edge exists");
        let (ca, cb) = (comp_of[a.index()], comp_of[b.index()]);
        if ca != cb && succ[ca].insert(cb) {
            indegree[cb] += 1;
        }
    }
    let least = |c: usize| components[c].iter().next().cloned().unwrap_or_default();
    let mut ready: BinaryHeap<Reverse<(String, usize)>> = (0..components.len())
        .filter(|&c| indegree[c] == 0)
        .map(|c| Reverse((least(c), c)))
        .collect();
    let mut order = Vec::with_capacity(components.len());
    while let Some(Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &d in &succ[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(Reverse((least(d), d)));
            }
        }
    }
    let mut taken: Vec<Option<BTreeSet<String>>> = components.into_iter().map(Some).collect();
    Stratification {
        components: order
            .into_iter()
            .map(|c| taken[c].take().expect("each component once"))
            .collect(),
    }
}
