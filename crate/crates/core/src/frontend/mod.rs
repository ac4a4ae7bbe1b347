//! The Datalog dialect: a small Soufflé-like subset without negation,
//! aggregation or arithmetic.
//!
//! ```text
//! .decl edge(s:symbol, t:symbol, @prov)
//! .input edge
//! .decl path(s:symbol, t:symbol, @prov)
//! .output path
//! path(x, y) :- edge(x, y).
//! path(x, y) :- path(x, z), edge(z, y).
//! ```
//!
//! Fact files are tab-separated, one per input relation, with the
//! annotation literal in the last column when the relation is declared with
//! `@prov`.

mod ast;
mod parser;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::semiring::{SemiringError, SemiringSpec};

pub use ast::{
    AnnotatedFact, Atom, AttrType, Attribute, Constant, Fact, Program, RelationDecl, Rule, Term,
};
pub use parser::parse_program;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, "; expected {}", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}", self.message)
    }
}

/// Checks every program invariant; the result is empty iff the program is
/// well-formed and each output relation can be derived.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for d in &program.declarations {
        if !seen.insert(d.name.as_str()) {
            out.push(Diagnostic::error(format!(
                "duplicate declaration of `{}`",
                d.name
            )));
        }
    }
    for name in program.inputs.iter().chain(&program.outputs) {
        if program.decl(name).is_none() {
            out.push(Diagnostic::error(format!("undeclared relation `{name}`")));
        }
    }
    for (i, rule) in program.rules.iter().enumerate() {
        let n = i + 1;
        if rule.body.is_empty() {
            out.push(Diagnostic::error(format!("rule {n} has an empty body")));
        }
        if program.is_edb(&rule.head.relation) {
            out.push(Diagnostic::error(format!(
                "EDB relation in rule head: `{}` (rule {n})",
                rule.head.relation
            )));
        }
        for atom in std::iter::once(&rule.head).chain(&rule.body) {
            let Some(decl) = program.decl(&atom.relation) else {
                out.push(Diagnostic::error(format!(
                    "undeclared relation `{}` (rule {n})",
                    atom.relation
                )));
                continue;
            };
            if decl.arity() != atom.terms.len() {
                out.push(Diagnostic::error(format!(
                    "`{}` has arity {} but is used with {} terms (rule {n})",
                    atom.relation,
                    decl.arity(),
                    atom.terms.len()
                )));
                continue;
            }
            for (term, attr) in atom.terms.iter().zip(&decl.attributes) {
                let mismatch = match term {
                    Term::Const(Constant::Num(_)) => attr.ty != AttrType::Number,
                    Term::Const(Constant::Sym(_)) => attr.ty != AttrType::Symbol,
                    Term::Var(_) => false,
                };
                if mismatch {
                    out.push(Diagnostic::error(format!(
                        "constant {term} does not match `{}:{}` of `{}` (rule {n})",
                        attr.name,
                        attr.ty.as_str(),
                        atom.relation
                    )));
                }
            }
        }
        for var in parser::unrestricted_head_vars(rule) {
            out.push(Diagnostic::error(format!(
                "head variable `{var}` does not occur in the body (rule {n})"
            )));
        }
    }

    let derivable = derivable_relations(program);
    for name in &program.outputs {
        if program.decl(name).is_some() && !derivable.contains(name.as_str()) {
            out.push(Diagnostic::warning(format!(
                "output relation `{name}` is never derived"
            )));
        }
    }
    out
}

/// Relations that can hold facts: inputs, plus heads of rules whose body
/// relations can all hold facts.
fn derivable_relations(program: &Program) -> BTreeSet<&str> {
    let mut derivable: BTreeSet<&str> = program.inputs.iter().map(String::as_str).collect();
    loop {
        let before = derivable.len();
        for rule in &program.rules {
            if rule
                .body
                .iter()
                .all(|a| derivable.contains(a.relation.as_str()))
            {
                derivable.insert(rule.head.relation.as_str());
            }
        }
        if derivable.len() == before {
            return derivable;
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactError {
    #[error("row {row}: expected {expected} columns, found {found}")]
    Arity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: `{text}` is not a number")]
    Number { row: usize, text: String },
    #[error("row {row}: {source}")]
    Value { row: usize, source: SemiringError },
}

/// Parses a tab-separated fact file for one relation. Rows repeating an atom
/// are merged with `⊕`; first-occurrence order is kept.
pub fn load_facts(
    source: &str,
    decl: &RelationDecl,
    spec: &SemiringSpec,
) -> Result<Vec<AnnotatedFact>, FactError> {
    let expected = decl.arity() + usize::from(decl.provenance);
    let mut out: Vec<AnnotatedFact> = Vec::new();
    let mut index: HashMap<Fact, usize> = HashMap::new();
    for (i, line) in source.lines().enumerate() {
        let row = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != expected {
            return Err(FactError::Arity {
                row,
                expected,
                found: cols.len(),
            });
        }
        let mut args = Vec::with_capacity(decl.arity());
        for (col, attr) in cols.iter().zip(&decl.attributes) {
            args.push(match attr.ty {
                AttrType::Symbol => Constant::Sym(col.to_string()),
                AttrType::Number => {
                    Constant::Num(col.trim().parse().map_err(|_| FactError::Number {
                        row,
                        text: col.to_string(),
                    })?)
                }
            });
        }
        let annotation = if decl.provenance {
            spec.parse_value(cols[decl.arity()])
                .map_err(|source| FactError::Value { row, source })?
        } else {
            spec.one()
        };
        let fact = Fact {
            relation: decl.name.clone(),
            args,
        };
        match index.get(&fact) {
            Some(&at) => {
                out[at].annotation = spec
                    .plus(&out[at].annotation, &annotation)
                    .map_err(|source| FactError::Value { row, source })?;
            }
            None => {
                index.insert(fact.clone(), out.len());
                out.push(AnnotatedFact { fact, annotation });
            }
        }
    }
    Ok(out)
}
