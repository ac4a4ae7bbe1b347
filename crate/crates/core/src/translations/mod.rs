//! Hypergraph to Datalog translations and AND/OR graph import.

mod andor;

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::frontend::{AnnotatedFact, Atom, AttrType, Constant, Fact, Program, RelationDecl, Rule};
use crate::hypergraph::{EdgeWeight, WeightedHypergraph};
use crate::semiring::SemiringSpec;

pub use crate::hypergraph::parse_hypergraph;
pub use andor::parse_andor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslationError {
    #[error("edge {edge} repeats vertex `{vertex}` in its tail")]
    RepeatedTail { edge: usize, vertex: String },
}

/// A generated program with its extensional facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub program: Program,
    pub facts: Vec<AnnotatedFact>,
    pub spec: SemiringSpec,
    /// Renamings and other remarks about the output.
    pub notes: Vec<String>,
}

impl Translation {
    /// Extensional facts of `relation`, in emission order.
    pub fn facts_of<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = &'a AnnotatedFact> {
        self.facts
            .iter()
            .filter(move |f| f.fact.relation == relation)
    }

    /// Writes `program.dl` and one `<relation>.facts` per input relation.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut text = format!("// semiring {}\n", self.spec.header());
        for note in &self.notes {
            text.push_str(&format!("// note: {note}\n"));
        }
        text.push_str(&self.program.to_string());
        fs::write(dir.join("program.dl"), text)?;
        for name in &self.program.inputs {
            let mut rows = String::new();
            for f in self.facts_of(name) {
                rows.push_str(&f.to_row(&self.spec));
                rows.push('\n');
            }
            fs::write(dir.join(format!("{name}.facts")), rows)?;
        }
        Ok(())
    }
}

fn sym(s: &str) -> Constant {
    Constant::Sym(s.to_string())
}

fn symbols(name: &str, attrs: &[&str]) -> RelationDecl {
    let a: Vec<(&str, AttrType)> = attrs.iter().map(|n| (*n, AttrType::Symbol)).collect();
    RelationDecl::new(name, &a, true)
}

/// One predicate `E<i+1>` per tail length `i` that occurs, and a unary `R`:
///
/// ```text
/// R(x) :- E1(x).
/// R(x) :- E<i+1>(x, x1, ..., xi), R(x1), ..., R(xi).
/// ```
///
/// Each edge becomes an `E<i+1>` fact over its head and tail; nullary edges
/// carry their weight, all others `one()`. `R(v)` then equals `δ(v)`.
pub fn hg_to_datalog_simple(h: &WeightedHypergraph) -> Translation {
    let spec = h.spec().clone();
    let arities: BTreeSet<usize> = h.edges().iter().map(|e| e.arity()).collect();
    let mut program = Program::default();
    program.declarations.push(symbols("R", &["x"]));
    program.outputs.insert("R".into());
    for &i in &arities {
        let name = format!("E{}", i + 1);
        let attrs: Vec<String> = std::iter::once("x".to_string())
            .chain((1..=i).map(|k| format!("x{k}")))
            .collect();
        let attrs: Vec<&str> = attrs.iter().map(String::as_str).collect();
        program.declarations.push(symbols(&name, &attrs));
        program.inputs.insert(name.clone());
        let mut body = vec![Atom::vars(&name, &attrs)];
        body.extend(attrs[1..].iter().map(|v| Atom::vars("R", &[v])));
        program.rules.push(Rule {
            head: Atom::vars("R", &["x"]),
            body,
        });
    }
    let facts = h
        .edges()
        .iter()
        .map(|e| {
            let args = std::iter::once(e.head)
                .chain(e.tail.iter().copied())
                .map(|v| sym(h.label(v)))
                .collect();
            let annotation = match &e.weight {
                EdgeWeight::Constant(c) => c.clone(),
                EdgeWeight::Product => spec.one(),
            };
            AnnotatedFact::new(Fact::new(&format!("E{}", e.arity() + 1), args), annotation)
        })
        .collect();
    Translation {
        program,
        facts,
        spec,
        notes: Vec::new(),
    }
}

/// The fixed five-rule program, independent of the hypergraph:
///
/// ```text
/// R(x) :- E(x, e), H(e).
/// H(e) :- First(e, x), R(x), N(e, x).
/// H(e) :- Nullary(e).
/// N(e, x) :- Next(e, x, y), R(y), N(e, y).
/// N(e, x) :- End(e, x).
/// ```
///
/// Edge `i` gets the constant `__e<i>`. Its tail is spelled out as a
/// `First`/`Next`/`End` chain, and `E(head, e)` links it to its head. A nullary
/// edge instead gets `Nullary(e)`, with its weight on `E(head, e)`. Tails must
/// not repeat a vertex, since `Next` is keyed by the current vertex.
pub fn hg_to_datalog_fixed(h: &WeightedHypergraph) -> Result<Translation, TranslationError> {
    let spec = h.spec().clone();
    let one = spec.one();
    let mut notes = Vec::new();

    let labels: BTreeSet<&str> = h.vertices().map(|v| h.label(v)).collect();
    let mut prefix = "__e".to_string();
    while (0..h.edges().len()).any(|i| labels.contains(format!("{prefix}{i}").as_str())) {
        prefix.push('_');
    }
    if prefix != "__e" {
        notes.push(format!(
            "edge constants use prefix `{prefix}` to avoid vertex labels"
        ));
    }

    let mut facts = Vec::new();
    let fact = |rel: &str, args: &[&str], v| {
        AnnotatedFact::new(Fact::new(rel, args.iter().map(|a| sym(a)).collect()), v)
    };
    for (i, e) in h.edges().iter().enumerate() {
        let name = format!("{prefix}{i}");
        let head = h.label(e.head);
        match &e.weight {
            EdgeWeight::Constant(c) => {
                facts.push(fact("E", &[head, &name], c.clone()));
                facts.push(fact("Nullary", &[&name], one.clone()));
            }
            EdgeWeight::Product => {
                let mut seen = BTreeSet::new();
                for &t in &e.tail {
                    if !seen.insert(t) {
                        return Err(TranslationError::RepeatedTail {
                            edge: i,
                            vertex: h.label(t).to_string(),
                        });
                    }
                }
                facts.push(fact("E", &[head, &name], one.clone()));
                let tail: Vec<&str> = e.tail.iter().map(|&t| h.label(t)).collect();
                facts.push(fact("First", &[&name, tail[0]], one.clone()));
                for w in tail.windows(2) {
                    facts.push(fact("Next", &[&name, w[0], w[1]], one.clone()));
                }
                facts.push(fact("End", &[&name, tail[tail.len() - 1]], one.clone()));
            }
        }
    }
    Ok(Translation {
        program: fixed_program(),
        facts,
        spec,
        notes,
    })
}

fn fixed_program() -> Program {
    let mut p = Program::default();
    for (name, attrs) in [
        ("R", &["x"][..]),
        ("H", &["e"]),
        ("N", &["e", "x"]),
        ("E", &["x", "e"]),
        ("Nullary", &["e"]),
        ("First", &["e", "x"]),
        ("Next", &["e", "x", "y"]),
        ("End", &["e", "x"]),
    ] {
        p.declarations.push(symbols(name, attrs));
    }
    for name in ["E", "Nullary", "First", "Next", "End"] {
        p.inputs.insert(name.into());
    }
    p.outputs.insert("R".into());
    let rule = |head: Atom, body: Vec<Atom>| Rule { head, body };
    p.rules = vec![
        rule(
            Atom::vars("R", &["x"]),
            vec![Atom::vars("E", &["x", "e"]), Atom::vars("H", &["e"])],
        ),
        rule(
            Atom::vars("H", &["e"]),
            vec![
                Atom::vars("First", &["e", "x"]),
                Atom::vars("R", &["x"]),
                Atom::vars("N", &["e", "x"]),
            ],
        ),
        rule(Atom::vars("H", &["e"]), vec![Atom::vars("Nullary", &["e"])]),
        rule(
            Atom::vars("N", &["e", "x"]),
            vec![
                Atom::vars("Next", &["e", "x", "y"]),
                Atom::vars("R", &["y"]),
                Atom::vars("N", &["e", "y"]),
            ],
        ),
        rule(
            Atom::vars("N", &["e", "x"]),
            vec![Atom::vars("End", &["e", "x"])],
        ),
    ];
    p
}

/// The fact `R(label)` whose value is `δ` of the vertex labelled `label`.
pub fn r_fact(label: &str) -> Fact {
    Fact::new("R", vec![sym(label)])
}
