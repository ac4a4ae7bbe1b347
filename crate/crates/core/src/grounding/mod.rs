//! Rule instantiation against an interned fact store.
//!
//! A [`Grounder`] compiles each rule once into join plans: one that draws
//! every body position from the settled set, and one per body occurrence for
//! trigger-driven instantiation. Settled atoms are indexed by the bound
//! positions those plans probe.

mod join;
mod precedence;
mod store;

use std::collections::VecDeque;

use thiserror::Error;

use crate::frontend::{validate, AnnotatedFact, Fact, Program, Severity};
use crate::semiring::{SemiringError, SemiringSpec, Value};

pub use join::GroundInstance;
pub use precedence::{precedence_graph, stratify, PrecedenceGraph, Stratification};
pub use store::{AtomId, ConstId, FactStore, RelId};

use join::CompiledRule;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundingError {
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` has more than 64 attributes")]
    TooWide(String),
    #[error("arity mismatch for `{0}`")]
    Arity(String),
    #[error("rule is not range-restricted: {0}")]
    RangeRestriction(String),
    #[error("`{0}` is not an input relation")]
    NotExtensional(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// A validated program compiled against a [`FactStore`].
pub struct Grounder {
    program: Program,
    store: FactStore,
    rules: Vec<CompiledRule>,
    /// Per relation: `(rule, body occurrence)` pairs where it appears.
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl Grounder {
    pub fn new(program: &Program, spec: SemiringSpec) -> Result<Self, GroundingError> {
        let errors: Vec<String> = validate(program)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.message)
            .collect();
        if !errors.is_empty() {
            return Err(GroundingError::Invalid(errors.join("; ")));
        }
        let names: Vec<String> = program
            .declarations
            .iter()
            .map(|d| d.name.clone())
            .collect();
        let mut store = FactStore::new(spec, names);
        let mut rules = Vec::with_capacity(program.rules.len());
        for rule in &program.rules {
            rules.push(join::compile(program, rule, &mut store)?);
        }
        let mut occurrences = vec![Vec::new(); program.declarations.len()];
        for (r, rule) in rules.iter().enumerate() {
            for (m, rel) in rule.body_relations().enumerate() {
                occurrences[rel as usize].push((r, m));
            }
        }
        Ok(Grounder {
            program: program.clone(),
            store,
            rules,
            occurrences,
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn spec(&self) -> &SemiringSpec {
        self.store.spec()
    }

    pub fn store(&self) -> &FactStore {
        &self.store
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn head_relation(&self, rule: usize) -> RelId {
        self.rules[rule].head_relation()
    }

    pub fn body_relations(&self, rule: usize) -> Vec<RelId> {
        self.rules[rule].body_relations().collect()
    }

    /// `(rule, occurrence)` pairs whose body occurrence has relation `rel`.
    pub fn occurrences(&self, rel: RelId) -> &[(usize, usize)] {
        &self.occurrences[rel as usize]
    }

    /// Sets and settles every EDB atom. Annotations of repeated atoms are
    /// merged with `⊕`; atoms whose annotation is `zero()` are skipped.
    pub fn load_edb(&mut self, edb: &[AnnotatedFact]) -> Result<(), GroundingError> {
        let mut loaded = Vec::new();
        for f in edb {
            let name = &f.fact.relation;
            if !self.program.is_edb(name) {
                return Err(GroundingError::NotExtensional(name.clone()));
            }
            let decl = self.program.decl(name).expect("inputs are declared");
            if decl.arity() != f.fact.args.len() {
                return Err(GroundingError::Arity(name.clone()));
            }
            let id = self.store.intern(&f.fact).expect("declared relation");
            let merged = self.spec().plus(self.store.value(id), &f.annotation)?;
            self.store.set_value(id, merged);
            loaded.push(id);
        }
        for id in loaded {
            if !self.spec().is_zero(self.store.value(id)) {
                self.store.settle(id);
            }
        }
        Ok(())
    }

    pub fn intern(&mut self, fact: &Fact) -> Option<AtomId> {
        self.store.intern(fact)
    }

    pub fn intern_head(&mut self, inst: &GroundInstance) -> AtomId {
        self.store
            .intern_ground(inst.head_relation, &inst.head_args)
    }

    pub fn lookup_head(&self, inst: &GroundInstance) -> Option<AtomId> {
        self.store
            .lookup_ground(inst.head_relation, &inst.head_args)
    }

    pub fn set_value(&mut self, id: AtomId, value: Value) {
        self.store.set_value(id, value);
    }

    /// Adds `id` to the settled set. Settled atoms must carry a non-zero value.
    pub fn settle(&mut self, id: AtomId) {
        debug_assert!(!self.spec().is_zero(self.store.value(id)));
        self.store.settle(id);
    }

    /// Instantiations of `rule`. Without a trigger, every instantiation over
    /// settled atoms. With one, the union over each body occurrence `m` of the
    /// trigger's relation of [`Grounder::instantiate_at`].
    pub fn instantiate(
        &self,
        rule: usize,
        trigger: Option<AtomId>,
    ) -> Result<Vec<GroundInstance>, GroundingError> {
        let mut out = Vec::new();
        match trigger {
            None => join::instantiate_all(&self.store, &self.rules[rule], rule, &mut out)?,
            Some(t) => {
                let rel = self.store.relation_of(t);
                for (m, r) in self.rules[rule].body_relations().enumerate() {
                    if r == rel {
                        join::instantiate_at(&self.store, &self.rules[rule], rule, t, m, &mut out)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Instantiations that place `trigger` at body occurrence `m`. Earlier
    /// occurrences range over the settled set plus the trigger, later ones
    /// over the settled set without it.
    pub fn instantiate_at(
        &self,
        rule: usize,
        trigger: AtomId,
        m: usize,
        out: &mut Vec<GroundInstance>,
    ) -> Result<(), GroundingError> {
        join::instantiate_at(&self.store, &self.rules[rule], rule, trigger, m, out)?;
        Ok(())
    }

    /// The head of `inst` as a fact.
    pub fn head_fact(&self, inst: &GroundInstance) -> Fact {
        Fact {
            relation: self.store.relation_name(inst.head_relation).to_string(),
            args: inst
                .head_args
                .iter()
                .map(|c| self.store.constant(*c).clone())
                .collect(),
        }
    }
}

/// Every atom with at least one proof tree, found by boolean saturation. EDB
/// atoms annotated `zero()` do not count. Atoms appear in the order they are
/// first derived.
pub fn derivable_atoms(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<Vec<Fact>, GroundingError> {
    let boolean = SemiringSpec::boolean();
    let mut g = Grounder::new(program, boolean.clone())?;
    let edb: Vec<AnnotatedFact> = edb
        .iter()
        .filter(|f| !spec.is_zero(&f.annotation))
        .map(|f| AnnotatedFact::new(f.fact.clone(), boolean.one()))
        .collect();
    g.load_edb(&edb)?;
    let mut order: Vec<AtomId> = g
        .store
        .atom_ids()
        .filter(|&id| g.store.is_settled(id))
        .collect();

    let mut queue = VecDeque::new();
    let fire = |g: &mut Grounder, insts: Vec<GroundInstance>, queue: &mut VecDeque<AtomId>| {
        for inst in insts {
            let id = g.intern_head(&inst);
            if !g.store.is_settled(id) {
                g.set_value(id, boolean.one());
                g.settle(id);
                queue.push_back(id);
            }
        }
    };
    for r in 0..g.rule_count() {
        let seed = g.instantiate(r, None)?;
        fire(&mut g, seed, &mut queue);
    }
    while let Some(t) = queue.pop_front() {
        order.push(t);
        let rel = g.store.relation_of(t);
        let uses = g.occurrences(rel).to_vec();
        for (r, m) in uses {
            let mut out = Vec::new();
            g.instantiate_at(r, t, m, &mut out)?;
            fire(&mut g, out, &mut queue);
        }
    }
    Ok(order.into_iter().map(|id| g.store.fact(id)).collect())
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet, HashSet};

    use super::*;
    use crate::frontend::{parse_program, Constant};

    const TC: &str = "
        .decl edge(x:symbol, y:symbol, @prov)
        .decl path(x:symbol, y:symbol, @prov)
        .input edge
        .output path
        path(x, y) :- edge(x, y).
        path(x, y) :- path(x, z), edge(z, y).
    ";

    fn edge(a: &str, b: &str, w: u64) -> AnnotatedFact {
        AnnotatedFact::new(Fact::syms("edge", &[a, b]), Value::tropical(w))
    }

    fn tc_grounder(edges: &[AnnotatedFact]) -> Grounder {
        let p = parse_program(TC).unwrap();
        let mut g = Grounder::new(&p, SemiringSpec::tropical()).unwrap();
        g.load_edb(edges).unwrap();
        g
    }

    fn assign(g: &mut Grounder, fact: Fact, v: Value) -> AtomId {
        let id = g.intern(&fact).unwrap();
        g.set_value(id, v);
        id
    }

    #[test]
    fn paris_trigger_extends_along_edge() {
        let mut g = tc_grounder(&[
            edge("Paris", "London", 3),
            edge("Paris", "Lille", 1),
            edge("Lille", "London", 0),
        ]);
        let t = assign(
            &mut g,
            Fact::syms("path", &["Paris", "Lille"]),
            Value::tropical(1),
        );
        let insts = g.instantiate(1, Some(t)).unwrap();
        assert_eq!(insts.len(), 1);
        assert_eq!(
            g.head_fact(&insts[0]),
            Fact::syms("path", &["Paris", "London"])
        );
        assert_eq!(insts[0].value, Value::tropical(1));
    }

    #[test]
    fn trigger_absent_from_body_yields_nothing() {
        let mut g = tc_grounder(&[edge("a", "b", 1)]);
        let t = assign(&mut g, Fact::syms("path", &["a", "b"]), Value::tropical(1));
        assert!(g.instantiate(0, Some(t)).unwrap().is_empty());
    }

    #[test]
    fn diamond_trigger() {
        let mut g = tc_grounder(&[
            edge("a", "b", 1),
            edge("b", "d", 1),
            edge("a", "c", 1),
            edge("c", "d", 1),
        ]);
        let t = assign(&mut g, Fact::syms("path", &["a", "b"]), Value::tropical(1));
        let insts = g.instantiate(1, Some(t)).unwrap();
        assert_eq!(insts.len(), 1);
        assert_eq!(g.head_fact(&insts[0]), Fact::syms("path", &["a", "d"]));
        assert_eq!(insts[0].value, Value::tropical(2));
    }

    #[test]
    fn untriggered_instantiation_uses_settled_atoms() {
        let g = tc_grounder(&[edge("a", "b", 4), edge("b", "c", 2)]);
        let insts = g.instantiate(0, None).unwrap();
        let heads: Vec<String> = insts.iter().map(|i| g.head_fact(i).to_string()).collect();
        assert_eq!(heads, ["path(a,b)", "path(b,c)"]);
        assert!(g.instantiate(1, None).unwrap().is_empty());
    }

    #[test]
    fn zero_annotations_are_not_settled() {
        let g = tc_grounder(&[edge("a", "b", 1)]);
        assert_eq!(g.store().settled_count(), 1);
        let mut g2 = tc_grounder(&[]);
        g2.load_edb(&[AnnotatedFact::new(
            Fact::syms("edge", &["a", "b"]),
            Value::infinity(),
        )])
        .unwrap();
        assert_eq!(g2.store().settled_count(), 0);
    }

    #[test]
    fn edb_load_rejects_idb_and_merges_duplicates() {
        let mut g = tc_grounder(&[edge("a", "b", 5), edge("a", "b", 2)]);
        let id = g.store().lookup(&Fact::syms("edge", &["a", "b"])).unwrap();
        assert_eq!(g.store().value(id), &Value::tropical(2));
        let bad = AnnotatedFact::new(Fact::syms("path", &["a", "b"]), Value::tropical(1));
        assert_eq!(
            g.load_edb(&[bad]),
            Err(GroundingError::NotExtensional("path".into()))
        );
    }

    #[test]
    fn constants_and_repeated_variables_filter_joins() {
        let p = parse_program(
            "
            .decl e(x:symbol, y:symbol)
            .decl loop(x:symbol)
            .decl froma(y:symbol)
            .input e
            loop(x) :- e(x, x).
            froma(y) :- e(\"a\", y).
            ",
        )
        .unwrap();
        let mut g = Grounder::new(&p, SemiringSpec::boolean()).unwrap();
        let t = |a: &str, b: &str| AnnotatedFact::new(Fact::syms("e", &[a, b]), Value::Bool(true));
        g.load_edb(&[t("a", "a"), t("a", "b"), t("b", "b"), t("c", "a")])
            .unwrap();
        let heads = |r| -> Vec<String> {
            g.instantiate(r, None)
                .unwrap()
                .iter()
                .map(|i| g.head_fact(i).to_string())
                .collect()
        };
        assert_eq!(heads(0), ["loop(a)", "loop(b)"]);
        assert_eq!(heads(1), ["froma(a)", "froma(b)"]);
    }

    #[test]
    fn derivable_atoms_of_paris() {
        let p = parse_program(TC).unwrap();
        let edb = [
            edge("Paris", "London", 3),
            edge("Paris", "Lille", 1),
            edge("Lille", "London", 0),
        ];
        let atoms = derivable_atoms(&p, &edb, &SemiringSpec::tropical()).unwrap();
        let labels: BTreeSet<String> = atoms.iter().map(ToString::to_string).collect();
        assert_eq!(atoms.len(), 6);
        assert!(labels.contains("path(Paris,London)"));
        assert!(labels.contains("path(Paris,Lille)"));
        assert!(labels.contains("path(Lille,London)"));
    }

    /// Brute-force join: every assignment of settled atoms to body positions
    /// whose variable bindings agree.
    fn brute_force(g: &Grounder, rule: usize) -> BTreeSet<(Fact, Vec<Fact>)> {
        let r = &g.program().rules[rule];
        let settled: Vec<Fact> = g
            .store()
            .atom_ids()
            .filter(|&id| g.store().is_settled(id))
            .map(|id| g.store().fact(id))
            .collect();
        let mut out = BTreeSet::new();
        let mut choice = vec![0usize; r.body.len()];
        if settled.is_empty() {
            return out;
        }
        loop {
            let body: Vec<&Fact> = choice.iter().map(|&i| &settled[i]).collect();
            let mut env: BTreeMap<&str, &Constant> = BTreeMap::new();
            let mut ok = true;
            'atoms: for (atom, fact) in r.body.iter().zip(&body) {
                if atom.relation != fact.relation {
                    ok = false;
                    break;
                }
                for (t, c) in atom.terms.iter().zip(&fact.args) {
                    match t {
                        crate::frontend::Term::Const(k) if k != c => {
                            ok = false;
                            break 'atoms;
                        }
                        crate::frontend::Term::Const(_) => {}
                        crate::frontend::Term::Var(v) => {
                            if *env.entry(v.as_str()).or_insert(c) != c {
                                ok = false;
                                break 'atoms;
                            }
                        }
                    }
                }
            }
            if ok {
                let head = Fact {
                    relation: r.head.relation.clone(),
                    args: r
                        .head
                        .terms
                        .iter()
                        .map(|t| match t {
                            crate::frontend::Term::Const(k) => k.clone(),
                            crate::frontend::Term::Var(v) => env[v.as_str()].clone(),
                        })
                        .collect(),
                };
                out.insert((head, body.into_iter().cloned().collect()));
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return out;
                }
                choice[i] += 1;
                if choice[i] < settled.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn key(g: &Grounder, inst: &GroundInstance) -> (Fact, Vec<Fact>) {
        (
            g.head_fact(inst),
            inst.body.iter().map(|b| g.store().fact(*b)).collect(),
        )
    }

    const MIXED: &str = "
        .decl e(x:symbol, y:symbol, @prov)
        .decl p(x:symbol, y:symbol, @prov)
        .decl q(x:symbol, @prov)
        .input e
        p(x, y) :- e(x, y).
        p(x, y) :- p(x, z), p(z, y).
        q(x) :- p(x, x), e(x, y).
        p(x, x) :- q(x), p(x, y), q(y).
    ";

    /// Settles atoms one at a time, firing every trigger split, and checks
    /// that each `(rule, body)` instance is produced once and that the union
    /// matches the brute-force join over the final settled set.
    fn run_incremental(program: &str, edges: &[(&str, &str)]) {
        let p = parse_program(program).unwrap();
        let mut g = Grounder::new(&p, SemiringSpec::tropical()).unwrap();
        let edb: Vec<AnnotatedFact> = edges
            .iter()
            .map(|(a, b)| AnnotatedFact::new(Fact::syms("e", &[a, b]), Value::tropical(1)))
            .collect();
        g.load_edb(&edb).unwrap();
        let mut produced: Vec<HashSet<(Fact, Vec<Fact>)>> = vec![HashSet::new(); g.rule_count()];
        let mut pending: VecDeque<AtomId> = VecDeque::new();
        let mut record =
            |g: &mut Grounder, insts: Vec<GroundInstance>, pending: &mut VecDeque<AtomId>| {
                for inst in insts {
                    let k = key(g, &inst);
                    assert!(
                        produced[inst.rule].insert(k.clone()),
                        "duplicate instance {k:?}"
                    );
                    let id = g.intern_head(&inst);
                    if !g.store().is_settled(id) && !pending.contains(&id) {
                        g.set_value(id, Value::tropical(1));
                        pending.push_back(id);
                    }
                }
            };
        for r in 0..g.rule_count() {
            if g.body_relations(r)
                .iter()
                .all(|rel| g.program().is_edb(g.store().relation_name(*rel)))
            {
                let insts = g.instantiate(r, None).unwrap();
                record(&mut g, insts, &mut pending);
            }
        }
        while let Some(t) = pending.pop_front() {
            let mut insts = Vec::new();
            for r in 0..g.rule_count() {
                insts.extend(g.instantiate(r, Some(t)).unwrap());
            }
            g.settle(t);
            record(&mut g, insts, &mut pending);
        }
        assert!(g.store().len() <= 100);
        for (r, insts) in produced.iter().enumerate() {
            let expected = brute_force(&g, r);
            let got: BTreeSet<_> = insts.iter().cloned().collect();
            assert_eq!(got, expected, "rule {r}");
        }
    }

    #[test]
    fn incremental_instantiation_is_complete_and_duplicate_free() {
        run_incremental(
            TC.replace("edge", "e").as_str(),
            &[("a", "b"), ("b", "c"), ("c", "a")],
        );
        run_incremental(MIXED, &[("a", "b"), ("b", "a"), ("b", "c")]);
        run_incremental(MIXED, &[("a", "a"), ("a", "b")]);
    }
}
