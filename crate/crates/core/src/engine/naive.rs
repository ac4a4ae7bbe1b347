use std::collections::BTreeMap;

use crate::frontend::{AnnotatedFact, Program};
use crate::grounding::{derivable_atoms, AtomId};
use crate::semiring::SemiringSpec;

use super::{collect_values, grounder, require_best_first, EvalError, EvalReport, Stats, Strategy};

/// Kleene iteration of the immediate consequence operator from the all-zero
/// IDB assignment. Each round recomputes every IDB value from the previous
/// round's values; the run stops after the first round that changes nothing.
///
/// `max_rounds` defaults to the number of derivable atoms plus one.
pub fn naive_fixpoint(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
    max_rounds: Option<u64>,
) -> Result<EvalReport, EvalError> {
    let max_rounds = match max_rounds {
        Some(n) => n,
        None => derivable_atoms(program, edb, spec)?.len() as u64 + 1,
    };
    let mut g = grounder(program, edb, spec)?;
    let mut stats = Stats::default();
    loop {
        stats.kleene_rounds += 1;
        // Jacobi step: all instances read the previous round's values.
        let mut next: BTreeMap<AtomId, crate::semiring::Value> = BTreeMap::new();
        for r in 0..g.rule_count() {
            for inst in g.instantiate(r, None)? {
                stats.rule_instantiations += 1;
                if spec.is_zero(&inst.value) {
                    continue;
                }
                let id = g.intern_head(&inst);
                let acc = next.entry(id).or_insert_with(|| spec.zero());
                *acc = spec.plus(acc, &inst.value)?;
            }
        }
        let mut changed = None;
        let idb: Vec<AtomId> = g
            .store()
            .atom_ids()
            .filter(|&id| g.store().is_settled(id) || next.contains_key(&id))
            .filter(|&id| !program.is_edb(g.store().relation_name(g.store().relation_of(id))))
            .collect();
        for id in idb {
            let new = next.remove(&id).unwrap_or_else(|| spec.zero());
            if *g.store().value(id) != new {
                changed.get_or_insert(id);
                let nonzero = !spec.is_zero(&new);
                g.set_value(id, new);
                if nonzero && !g.store().is_settled(id) {
                    g.settle(id);
                }
            }
        }
        match changed {
            None => break,
            Some(id) if stats.kleene_rounds >= max_rounds => {
                return Err(EvalError::Divergence {
                    rounds: stats.kleene_rounds,
                    atom: g.store().fact(id).to_string(),
                });
            }
            Some(_) => {}
        }
    }
    Ok(EvalReport {
        strategy: Strategy::Naive,
        values: collect_values(&g, false),
        stats,
        dimensions: None,
        settle_order: Vec::new(),
    })
}

/// Settles one atom per iteration: recomputes candidate values of every
/// unsettled atom from the settled ones and settles the least, ties going to
/// the smaller atom id. Stops when no unsettled atom has a non-zero
/// candidate.
pub fn best_first_naive(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<EvalReport, EvalError> {
    require_best_first(Strategy::BestFirst, spec)?;
    let mut g = grounder(program, edb, spec)?;
    let mut stats = Stats::default();
    let mut settle_order = Vec::new();
    loop {
        let mut candidates: BTreeMap<AtomId, crate::semiring::Value> = BTreeMap::new();
        for r in 0..g.rule_count() {
            for inst in g.instantiate(r, None)? {
                stats.rule_instantiations += 1;
                if spec.is_zero(&inst.value) {
                    continue;
                }
                let id = g.intern_head(&inst);
                if g.store().is_settled(id) {
                    continue;
                }
                let acc = candidates.entry(id).or_insert_with(|| spec.zero());
                *acc = spec.plus(acc, &inst.value)?;
            }
        }
        let mut best = None;
        for (id, v) in candidates {
            let key = spec.priority_key(&v)?;
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, id, v));
            }
        }
        let Some((_, id, v)) = best else { break };
        stats.extractions += 1;
        g.set_value(id, v.clone());
        g.settle(id);
        settle_order.push((g.store().fact(id), v));
    }
    Ok(EvalReport {
        strategy: Strategy::BestFirst,
        values: collect_values(&g, true),
        stats,
        dimensions: None,
        settle_order,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{edges, paris, TC};
    use super::*;
    use crate::frontend::{parse_program, Fact};
    use crate::semiring::Value;

    #[test]
    fn empty_edb_takes_one_round() {
        let p = parse_program(TC).unwrap();
        let r = naive_fixpoint(&p, &[], &SemiringSpec::tropical(), None).unwrap();
        assert!(r.values.is_empty());
        assert_eq!(r.stats.kleene_rounds, 1);
    }

    #[test]
    fn three_cycle_boolean_reaches_everything() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::boolean();
        let edb = edges(
            &spec,
            &[("a", "b", "true"), ("b", "c", "true"), ("c", "a", "true")],
        );
        let r = naive_fixpoint(&p, &edb, &spec, None).unwrap();
        assert_eq!(r.values.len(), 9);
        assert!(r.values.values().all(|v| *v == Value::Bool(true)));
    }

    #[test]
    fn counting_cycle_diverges() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::counting();
        let edb = edges(&spec, &[("a", "a", "1")]);
        let err = naive_fixpoint(&p, &edb, &spec, Some(5)).unwrap_err();
        match err {
            EvalError::Divergence { rounds, atom } => {
                assert_eq!(rounds, 5);
                assert_eq!(atom, "path(a,a)");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn counting_dag_counts_proof_trees() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::counting();
        let edb = edges(
            &spec,
            &[
                ("a", "b", "1"),
                ("b", "d", "1"),
                ("a", "c", "1"),
                ("c", "d", "1"),
            ],
        );
        let r = naive_fixpoint(&p, &edb, &spec, None).unwrap();
        assert_eq!(
            r.value(&Fact::syms("path", &["a", "d"])),
            Some(&Value::Nat(2))
        );
    }

    #[test]
    fn best_first_naive_extraction_order() {
        let p = parse_program(TC).unwrap();
        let r = best_first_naive(&p, &paris(), &SemiringSpec::tropical()).unwrap();
        let order: Vec<(String, Value)> = r
            .settle_order
            .iter()
            .map(|(f, v)| (f.to_string(), v.clone()))
            .collect();
        assert_eq!(
            order,
            [
                ("path(Lille,London)".to_string(), Value::tropical(0)),
                ("path(Paris,Lille)".to_string(), Value::tropical(1)),
                ("path(Paris,London)".to_string(), Value::tropical(1)),
            ]
        );
        assert_eq!(r.stats.extractions, 3);
    }

    #[test]
    fn no_rules_means_no_extractions() {
        let p = parse_program(".decl e(x:symbol, @prov)\n.input e").unwrap();
        let spec = SemiringSpec::tropical();
        let edb = [AnnotatedFact::new(
            Fact::syms("e", &["a"]),
            Value::tropical(2),
        )];
        let r = best_first_naive(&p, &edb, &spec).unwrap();
        assert!(r.values.is_empty());
        assert_eq!(r.stats.extractions, 0);
    }
}
