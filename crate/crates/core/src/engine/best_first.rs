use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use crate::frontend::{AnnotatedFact, Fact, Program};
use crate::grounding::{precedence_graph, stratify, AtomId, Grounder, RelId};
use crate::semiring::{PriorityKey, Value};
use crate::SemiringSpec;

use super::{collect_values, grounder, require_best_first, EvalError, EvalReport, Stats, Strategy};

/// A queued candidate. Entries order by `(key, atom)`; an entry is stale once
/// its atom is settled or its value is no longer the atom's current value.
#[derive(Clone, Debug)]
pub struct PriorityEntry {
    pub key: PriorityKey,
    pub atom: AtomId,
    pub value: Value,
    pub generation: u64,
}

impl PartialEq for PriorityEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PriorityEntry {}

impl PartialOrd for PriorityEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PriorityEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.key, self.atom, self.generation).cmp(&(other.key, other.atom, other.generation))
    }
}

struct Run<'a> {
    g: &'a mut Grounder,
    spec: SemiringSpec,
    queue: BinaryHeap<Reverse<PriorityEntry>>,
    generation: u64,
    stats: Stats,
    settle_order: Vec<(Fact, Value)>,
}

impl Run<'_> {
    /// `ν(head) ⊕= value`, queueing the head when its value improves.
    fn merge(&mut self, head: AtomId, value: &Value) -> Result<(), EvalError> {
        let old = self.g.store().value(head).clone();
        let new = self.spec.plus(&old, value)?;
        if new == old {
            return Ok(());
        }
        if self.g.store().is_settled(head) {
            return Err(EvalError::Invariant(format!(
                "`{}` settled with {} but a later instance gives {}",
                self.g.store().fact(head),
                self.spec.format_value(&old),
                self.spec.format_value(&new)
            )));
        }
        self.g.set_value(head, new.clone());
        self.generation += 1;
        self.queue.push(Reverse(PriorityEntry {
            key: self.spec.priority_key(&new)?,
            atom: head,
            value: new,
            generation: self.generation,
        }));
        self.stats.queue_pushes += 1;
        Ok(())
    }

    fn fire(&mut self, instances: Vec<crate::grounding::GroundInstance>) -> Result<(), EvalError> {
        for inst in instances {
            self.stats.rule_instantiations += 1;
            if self.spec.is_zero(&inst.value) {
                continue;
            }
            let head = self.g.intern_head(&inst);
            self.merge(head, &inst.value)?;
        }
        Ok(())
    }

    /// Evaluates the rules whose heads lie in `heads`, treating every atom
    /// already settled as extensional.
    fn component(&mut self, heads: &BTreeSet<RelId>) -> Result<(), EvalError> {
        let rules: Vec<usize> = (0..self.g.rule_count())
            .filter(|&r| heads.contains(&self.g.head_relation(r)))
            .collect();
        for &r in &rules {
            if self
                .g
                .body_relations(r)
                .iter()
                .all(|rel| !heads.contains(rel))
            {
                let seed = self.g.instantiate(r, None)?;
                self.fire(seed)?;
            }
        }
        while let Some(Reverse(entry)) = self.queue.pop() {
            let t = entry.atom;
            if self.g.store().is_settled(t) || *self.g.store().value(t) != entry.value {
                self.stats.stale_pops += 1;
                continue;
            }
            self.stats.extractions += 1;
            self.g.settle(t);
            self.settle_order
                .push((self.g.store().fact(t), entry.value));
            let uses: Vec<(usize, usize)> = self
                .g
                .occurrences(self.g.store().relation_of(t))
                .iter()
                .copied()
                .filter(|(r, _)| heads.contains(&self.g.head_relation(*r)))
                .collect();
            let mut out = Vec::new();
            for (r, m) in uses {
                out.clear();
                self.g.instantiate_at(r, t, m, &mut out)?;
                self.fire(std::mem::take(&mut out))?;
            }
        }
        Ok(())
    }
}

fn run(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
    strategy: Strategy,
    components: Vec<BTreeSet<String>>,
) -> Result<EvalReport, EvalError> {
    require_best_first(strategy, spec)?;
    let mut g = grounder(program, edb, spec)?;
    let mut r = Run {
        g: &mut g,
        spec: spec.clone(),
        queue: BinaryHeap::new(),
        generation: 0,
        stats: Stats::default(),
        settle_order: Vec::new(),
    };
    for comp in components {
        let heads: BTreeSet<RelId> = comp
            .iter()
            .filter_map(|name| r.g.store().relation_id(name))
            .collect();
        r.component(&heads)?;
    }
    let stats = r.stats;
    let settle_order = std::mem::take(&mut r.settle_order);
    Ok(EvalReport {
        strategy,
        values: collect_values(&g, true),
        stats,
        dimensions: None,
        settle_order,
    })
}

/// Best-first evaluation with a priority queue: seeds from rules whose bodies
/// are all extensional, then repeatedly settles the least queued atom and
/// relaxes every rule occurrence of it.
pub fn best_first_seminaive(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<EvalReport, EvalError> {
    let all = program.idb_relations().map(|d| d.name.clone()).collect();
    run(program, edb, spec, Strategy::Seminaive, vec![all])
}

/// [`best_first_seminaive`] once per strongly connected component of the
/// precedence graph, in topological order.
pub fn run_stratified(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<EvalReport, EvalError> {
    let strata = stratify(&precedence_graph(program));
    run(program, edb, spec, Strategy::Stratified, strata.components)
}

#[cfg(test)]
mod tests {
    use super::super::naive_fixpoint;
    use super::super::tests::{edges, paris, TC};
    use super::*;
    use crate::frontend::parse_program;
    use crate::semiring::cmp_natural;

    #[test]
    fn paris_counts() {
        let p = parse_program(TC).unwrap();
        let r = best_first_seminaive(&p, &paris(), &SemiringSpec::tropical()).unwrap();
        assert_eq!(r.stats.rule_instantiations, 4);
        assert_eq!(r.stats.extractions, 3);
        assert_eq!(r.values.len(), 3);
    }

    #[test]
    fn chain_of_twenty() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::tropical();
        let names: Vec<String> = (0..=20).map(|i| format!("n{i}")).collect();
        let list: Vec<(&str, &str, &str)> = (0..20)
            .map(|i| (names[i].as_str(), names[i + 1].as_str(), "1"))
            .collect();
        let r = best_first_seminaive(&p, &edges(&spec, &list), &spec).unwrap();
        assert_eq!(r.values.len(), 210);
        let settled: Vec<&Value> = r.settle_order.iter().map(|(_, v)| v).collect();
        assert_eq!(settled.len(), 210);
        assert_eq!(*settled[0], Value::tropical(1));
        assert_eq!(*settled[209], Value::tropical(20));
        for w in settled.windows(2) {
            assert_ne!(cmp_natural(&spec, w[0], w[1]).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn stratified_iris_matches_unstratified() {
        let p = parse_program(
            "
            .decl e(x:symbol, y:symbol, @prov)
            .decl ra(x:symbol, y:symbol, @prov)
            .decl rb(x:symbol, y:symbol, @prov)
            .decl r(x:symbol, y:symbol, @prov)
            .decl q(x:symbol, @prov)
            .input e
            ra(x, y) :- e(x, y).
            rb(x, y) :- e(y, x).
            r(x, y) :- ra(x, z), rb(z, y).
            q(x) :- r(x, y).
            ",
        )
        .unwrap();
        let spec = SemiringSpec::tropical();
        let edb: Vec<AnnotatedFact> = [("a", "b", 2), ("c", "b", 1), ("b", "d", 5), ("a", "d", 1)]
            .iter()
            .map(|(x, y, w)| AnnotatedFact::new(Fact::syms("e", &[x, y]), Value::tropical(*w)))
            .collect();
        let s = run_stratified(&p, &edb, &spec).unwrap();
        let u = best_first_seminaive(&p, &edb, &spec).unwrap();
        let n = naive_fixpoint(&p, &edb, &spec, None).unwrap();
        assert_eq!(s.values, u.values);
        assert_eq!(s.values, n.values);
        assert_eq!(s.value(&Fact::syms("q", &["a"])), Some(&Value::tropical(2)));
    }

    #[test]
    fn two_strata_multiply() {
        let p = parse_program(
            "
            .decl e(x:symbol, y:symbol, @prov)
            .decl p(x:symbol, y:symbol, @prov)
            .decl s(x:symbol, y:symbol, @prov)
            .input e
            p(x, y) :- e(x, y).
            p(x, y) :- p(x, z), e(z, y).
            s(x, y) :- p(x, y), p(y, x).
            ",
        )
        .unwrap();
        let spec = SemiringSpec::tropical();
        let edb = edges(&spec, &[]);
        let edb: Vec<AnnotatedFact> = edb
            .into_iter()
            .chain(
                [("a", "b", 2), ("b", "a", 3), ("b", "c", 1)]
                    .iter()
                    .map(|(x, y, w)| {
                        AnnotatedFact::new(Fact::syms("e", &[x, y]), Value::tropical(*w))
                    }),
            )
            .collect();
        let s = run_stratified(&p, &edb, &spec).unwrap();
        let n = naive_fixpoint(&p, &edb, &spec, None).unwrap();
        assert_eq!(s.values, n.values);
        assert_eq!(
            s.value(&Fact::syms("s", &["a", "a"])),
            Some(&Value::tropical(10))
        );
    }
}
