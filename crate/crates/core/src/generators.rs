//! Seeded instance generators shared by the tests, the CLI benchmark and the
//! criterion harness. Every function is a pure function of the RNG state.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::frontend::{
    parse_program, AnnotatedFact, Atom, AttrType, Constant, Fact, Program, RelationDecl, Rule, Term,
};
use crate::hypergraph::WeightedHypergraph;
use crate::semiring::{SemiringKind, SemiringSpec, Tropical, Value};

/// Transitive closure over an annotated `edge` relation.
pub const TC_PROGRAM: &str = "\
.decl edge(s:symbol, t:symbol, @prov)
.input edge
.decl path(s:symbol, t:symbol, @prov)
.output path
path(x, y) :- edge(x, y).
path(x, y) :- path(x, z), edge(z, y).
";

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub program: Program,
    pub edb: Vec<AnnotatedFact>,
    pub spec: SemiringSpec,
}

pub fn tc_program() -> Program {
    parse_program(TC_PROGRAM).expect("built-in program parses")
}

/// The three-edge Paris/Lille/London instance under the tropical semiring.
pub fn paris() -> Instance {
    let spec = SemiringSpec::tropical();
    let edb = [
        ("Paris", "London", 3),
        ("Paris", "Lille", 1),
        ("Lille", "London", 0),
    ]
    .iter()
    .map(|&(a, b, w)| AnnotatedFact::new(Fact::syms("edge", &[a, b]), Value::tropical(w)))
    .collect();
    Instance {
        name: "paris".into(),
        program: tc_program(),
        edb,
        spec,
    }
}

/// A small random value that is never `zero()`. Tropical values are integers
/// in `0..=10`.
pub fn small_value<R: Rng + ?Sized>(rng: &mut R, spec: &SemiringSpec) -> Value {
    match spec.kind() {
        SemiringKind::Tropical => Value::Tropical(Tropical::int(rng.random_range(0..=10))),
        SemiringKind::Boolean => Value::Bool(true),
        _ => loop {
            let v = spec.sample(rng);
            if !spec.is_zero(&v) {
                return v;
            }
        },
    }
}

fn edge(a: &str, b: &str, w: Value) -> AnnotatedFact {
    AnnotatedFact::new(Fact::syms("edge", &[a, b]), w)
}

/// `edges` random arcs over `nodes` vertices `n0, n1, ...`; parallel arcs
/// collapse when the facts are loaded.
pub fn random_graph<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &SemiringSpec,
    nodes: usize,
    edges: usize,
) -> Instance {
    let names: Vec<String> = (0..nodes).map(|i| format!("n{i}")).collect();
    let edb = if nodes == 0 {
        Vec::new()
    } else {
        (0..edges)
            .map(|_| {
                let a = &names[rng.random_range(0..nodes)];
                let b = &names[rng.random_range(0..nodes)];
                edge(a, b, small_value(rng, spec))
            })
            .collect()
    };
    Instance {
        name: format!("graph-{nodes}-{edges}"),
        program: tc_program(),
        edb,
        spec: spec.clone(),
    }
}

/// A graph of at most 8 nodes with up to twice as many arcs.
pub fn small_graph<R: Rng + ?Sized>(rng: &mut R, spec: &SemiringSpec) -> Instance {
    let nodes = rng.random_range(1..=8);
    let edges = rng.random_range(0..=2 * nodes);
    random_graph(rng, spec, nodes, edges)
}

/// `v0 -> v1 -> ... -> v<len>` with unit tropical weights.
pub fn chain_graph(len: usize) -> Instance {
    let edb = (0..len)
        .map(|i| edge(&format!("v{i}"), &format!("v{}", i + 1), Value::tropical(1)))
        .collect();
    Instance {
        name: format!("chain-{len}"),
        program: tc_program(),
        edb,
        spec: SemiringSpec::tropical(),
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

/// A random program over EDB `a/2`, `b/1` and IDB `p/2`, `q/1`, `r/2` with
/// one to three range-restricted rules, over a domain of two or three
/// constants.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, spec: &SemiringSpec) -> Instance {
    let relations: [(&str, usize); 5] = [("a", 2), ("b", 1), ("p", 2), ("q", 1), ("r", 2)];
    let domain: Vec<String> = (0..rng.random_range(2..=3))
        .map(|i| format!("c{i}"))
        .collect();
    let mut program = Program::default();
    for &(name, arity) in &relations {
        let attrs: Vec<(&str, AttrType)> = ["u", "v"][..arity]
            .iter()
            .map(|&n| (n, AttrType::Symbol))
            .collect();
        program
            .declarations
            .push(RelationDecl::new(name, &attrs, true));
    }
    program.inputs = ["a", "b"].map(String::from).into();
    program.outputs = ["p", "q", "r"].map(String::from).into();

    for _ in 0..rng.random_range(1..=3) {
        let len = rng.random_range(1..=3);
        let mut body = Vec::with_capacity(len);
        for i in 0..len {
            // The first atom is extensional so that most rules can fire.
            let &(rel, arity) = if i == 0 {
                relations[..2].choose(rng).unwrap()
            } else {
                relations.choose(rng).unwrap()
            };
            let terms = (0..arity)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        Term::Const(Constant::sym(domain.choose(rng).unwrap().as_str()))
                    } else {
                        Term::var(VARS.choose(rng).unwrap())
                    }
                })
                .collect();
            body.push(Atom::new(rel, terms));
        }
        let bound: Vec<String> = {
            let mut vs: Vec<String> = Vec::new();
            for a in &body {
                for v in a.variables() {
                    if !vs.iter().any(|w| w == v) {
                        vs.push(v.to_string());
                    }
                }
            }
            vs
        };
        let &(head, arity) = relations[2..].choose(rng).unwrap();
        let terms = (0..arity)
            .map(|_| match bound.choose(rng) {
                Some(v) => Term::var(v),
                None => Term::Const(Constant::sym(domain.choose(rng).unwrap().as_str())),
            })
            .collect();
        program.rules.push(Rule {
            head: Atom::new(head, terms),
            body,
        });
    }

    let mut edb = Vec::new();
    for _ in 0..rng.random_range(1..=5) {
        let (x, y) = (domain.choose(rng).unwrap(), domain.choose(rng).unwrap());
        edb.push(AnnotatedFact::new(
            Fact::syms("a", &[x, y]),
            small_value(rng, spec),
        ));
    }
    for _ in 0..rng.random_range(0..=3) {
        let x = domain.choose(rng).unwrap();
        edb.push(AnnotatedFact::new(
            Fact::syms("b", &[x]),
            small_value(rng, spec),
        ));
    }
    Instance {
        name: "random-program".into(),
        program,
        edb,
        spec: spec.clone(),
    }
}

/// A set lattice over one to three tokens `t0, t1, ...`.
pub fn random_set_lattice<R: Rng + ?Sized>(rng: &mut R) -> SemiringSpec {
    let n = rng.random_range(1..=3);
    SemiringSpec::set_lattice((0..n).map(|i| format!("t{i}"))).expect("small universe")
}

/// A random hypergraph with at most `max_vertices` vertices and tails of at
/// most `max_arity` distinct vertices. Roughly half the vertices are sources.
pub fn random_hypergraph<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &SemiringSpec,
    max_vertices: usize,
    max_arity: usize,
) -> WeightedHypergraph {
    let mut h = WeightedHypergraph::new(spec.clone());
    let n = rng.random_range(1..=max_vertices.max(1));
    for i in 0..n {
        h.add_vertex(format!("v{i}")).expect("labels are distinct");
    }
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..rng.random_range(0..=2 * n) {
        let head = rng.random_range(0..n);
        let arity = rng.random_range(1..=max_arity.clamp(1, n));
        let tail: Vec<usize> = all.choose_multiple(rng, arity).copied().collect();
        h.add_edge(head, tail).expect("non-empty tail");
    }
    for v in 0..n {
        if rng.random_bool(0.5) {
            let w = small_value(rng, spec);
            h.add_source(v, w).expect("one source per vertex");
        }
    }
    h
}
