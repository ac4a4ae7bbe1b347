use std::collections::BTreeSet;
use std::fmt;

use crate::semiring::{SemiringSpec, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttrType {
    Symbol,
    Number,
}

impl AttrType {
    pub fn as_str(self) -> &'static str {
        match self {
            AttrType::Symbol => "symbol",
            AttrType::Number => "number",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub ty: AttrType,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationDecl {
    pub name: String,
    pub attributes: Vec<Attribute>,
    /// Set by a trailing `@prov` attribute: fact rows carry an annotation column.
    pub provenance: bool,
}

impl RelationDecl {
    pub fn new(name: impl Into<String>, attrs: &[(&str, AttrType)], provenance: bool) -> Self {
        RelationDecl {
            name: name.into(),
            attributes: attrs
                .iter()
                .map(|(n, ty)| Attribute {
                    name: n.to_string(),
                    ty: *ty,
                })
                .collect(),
            provenance,
        }
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }
}

/// A constant of the Herbrand universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Num(i64),
    Sym(String),
}

impl Constant {
    pub fn sym(s: impl Into<String>) -> Self {
        Constant::Sym(s.into())
    }

    /// Raw text as written in a fact file column.
    pub fn raw(&self) -> String {
        match self {
            Constant::Num(n) => n.to_string(),
            Constant::Sym(s) => s.clone(),
        }
    }

    /// Text used inside ground-atom labels: symbols stay bare when they read
    /// unambiguously, otherwise they are quoted.
    fn label(&self) -> String {
        match self {
            Constant::Sym(s) if is_bare_symbol(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

fn is_bare_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Num(n) => write!(f, "{n}"),
            Constant::Sym(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(relation: &str, terms: Vec<Term>) -> Self {
        Atom {
            relation: relation.to_string(),
            terms,
        }
    }

    /// Atom whose terms are all variables.
    pub fn vars(relation: &str, vars: &[&str]) -> Self {
        Atom::new(relation, vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// A parsed Datalog program. Relations named by `.input` form the EDB; every
/// other declared relation is intensional.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub declarations: Vec<RelationDecl>,
    pub inputs: BTreeSet<String>,
    pub outputs: BTreeSet<String>,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&RelationDecl> {
        self.declarations.iter().find(|d| d.name == name)
    }

    pub fn is_edb(&self, name: &str) -> bool {
        self.inputs.contains(name)
    }

    pub fn is_idb(&self, name: &str) -> bool {
        self.decl(name).is_some() && !self.is_edb(name)
    }

    pub fn idb_relations(&self) -> impl Iterator<Item = &RelationDecl> {
        self.declarations.iter().filter(|d| !self.is_edb(&d.name))
    }

    pub fn edb_relations(&self) -> impl Iterator<Item = &RelationDecl> {
        self.declarations.iter().filter(|d| self.is_edb(&d.name))
    }
}

/// Pretty-printer; its output parses back to an equal `Program`.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.declarations {
            write!(f, ".decl {}(", d.name)?;
            let mut first = true;
            for a in &d.attributes {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{}:{}", a.name, a.ty.as_str())?;
            }
            if d.provenance {
                if !first {
                    f.write_str(", ")?;
                }
                f.write_str("@prov")?;
            }
            writeln!(f, ")")?;
        }
        for i in &self.inputs {
            writeln!(f, ".input {i}")?;
        }
        for o in &self.outputs {
            writeln!(f, ".output {o}")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A ground atom: relation name plus constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub relation: String,
    pub args: Vec<Constant>,
}

impl Fact {
    pub fn new(relation: &str, args: Vec<Constant>) -> Self {
        Fact {
            relation: relation.to_string(),
            args,
        }
    }

    /// Convenience for symbol-only facts.
    pub fn syms(relation: &str, args: &[&str]) -> Self {
        Fact::new(relation, args.iter().map(|a| Constant::sym(*a)).collect())
    }
}

/// Canonical label, e.g. `path(Paris,London)`.
impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, c) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&c.label())?;
        }
        f.write_str(")")
    }
}

/// An extensional fact with its provenance annotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnnotatedFact {
    pub fact: Fact,
    pub annotation: Value,
}

impl AnnotatedFact {
    pub fn new(fact: Fact, annotation: Value) -> Self {
        AnnotatedFact { fact, annotation }
    }

    /// One TSV row: argument columns, then the annotation literal.
    pub fn to_row(&self, spec: &SemiringSpec) -> String {
        let mut cols: Vec<String> = self.fact.args.iter().map(Constant::raw).collect();
        cols.push(spec.format_value(&self.annotation));
        cols.join("\t")
    }
}
