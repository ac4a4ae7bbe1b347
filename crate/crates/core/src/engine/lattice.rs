use std::collections::BTreeMap;
use std::thread;

use crate::frontend::{AnnotatedFact, Program};
use crate::grounding::derivable_atoms;
use crate::semiring::{SemiringSpec, Value};

use super::{run_stratified, EvalError, EvalReport, Stats, Strategy};

/// Decomposes every EDB annotation into chain coordinates, evaluates each
/// dimension independently with [`run_stratified`], and recomposes the
/// per-atom results. Dimensions run on separate threads.
pub fn run_lattice(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<EvalReport, EvalError> {
    let Some(dims) = spec.lattice_dims() else {
        return Err(EvalError::Unsupported {
            strategy: Strategy::Lattice,
            semiring: spec.header(),
            reason: "no lattice decomposition".into(),
        });
    };
    let specs: Vec<SemiringSpec> = (0..dims)
        .map(|i| spec.dimension_spec(i))
        .collect::<Result<_, _>>()?;
    let coords: Vec<Vec<Value>> = edb
        .iter()
        .map(|f| spec.decompose(&f.annotation))
        .collect::<Result<_, _>>()?;
    let projected: Vec<Vec<AnnotatedFact>> = (0..dims)
        .map(|i| {
            edb.iter()
                .zip(&coords)
                .map(|(f, c)| AnnotatedFact::new(f.fact.clone(), c[i].clone()))
                .collect()
        })
        .collect();

    let reports: Vec<Result<EvalReport, EvalError>> = thread::scope(|s| {
        let handles: Vec<_> = specs
            .iter()
            .zip(&projected)
            .map(|(dspec, dedb)| s.spawn(move || run_stratified(program, dedb, dspec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("dimension thread panicked"))
            .collect()
    });
    let reports: Vec<EvalReport> = reports.into_iter().collect::<Result<_, _>>()?;

    let mut values = BTreeMap::new();
    let mut stats = Stats::default();
    for r in &reports {
        stats.add(&r.stats);
    }
    for fact in derivable_atoms(program, edb, spec)? {
        if program.is_edb(&fact.relation) {
            continue;
        }
        let coords: Vec<Value> = reports
            .iter()
            .zip(&specs)
            .map(|(r, d)| r.value(&fact).cloned().unwrap_or_else(|| d.zero()))
            .collect();
        let v = spec.recompose(&coords)?;
        if !spec.is_zero(&v) {
            values.insert(fact, v);
        }
    }
    Ok(EvalReport {
        strategy: Strategy::Lattice,
        values,
        stats,
        dimensions: Some(reports),
        settle_order: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::naive_fixpoint;
    use super::super::tests::{edges, TC};
    use super::*;
    use crate::frontend::{parse_program, Fact};

    #[test]
    fn two_edge_chain_unions_tokens() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::set_lattice(["a", "b", "c"]).unwrap();
        let edb = edges(&spec, &[("1", "2", "{a}"), ("2", "3", "{b}")]);
        let r = run_lattice(&p, &edb, &spec).unwrap();
        assert_eq!(
            r.value(&Fact::syms("path", &["1", "3"])),
            spec.parse_value("{a,b}").ok().as_ref()
        );
        assert_eq!(r.dimensions.as_ref().map(Vec::len), Some(3));
        assert_eq!(
            r.values,
            naive_fixpoint(&p, &edb, &spec, None).unwrap().values
        );
    }

    #[test]
    fn full_universe_is_zero_and_omitted() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::set_lattice(["a", "b"]).unwrap();
        let edb = edges(&spec, &[("1", "2", "{a}"), ("2", "3", "{b}")]);
        let r = run_lattice(&p, &edb, &spec).unwrap();
        assert_eq!(r.value(&Fact::syms("path", &["1", "3"])), None);
        assert_eq!(
            r.values,
            naive_fixpoint(&p, &edb, &spec, None).unwrap().values
        );
    }

    #[test]
    fn single_token_universe() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::set_lattice(["a"]).unwrap();
        let edb = edges(
            &spec,
            &[("1", "2", "{}"), ("2", "3", "{a}"), ("1", "3", "{}")],
        );
        let r = run_lattice(&p, &edb, &spec).unwrap();
        let dim = &r.dimensions.as_ref().unwrap()[0];
        assert_eq!(r.values.len(), dim.values.len());
        assert_eq!(
            r.values,
            naive_fixpoint(&p, &edb, &spec, None).unwrap().values
        );
    }

    #[test]
    fn chain_product() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::chain_product(vec![3, 2]).unwrap();
        let edb = edges(
            &spec,
            &[
                ("1", "2", "(1,0)"),
                ("2", "3", "(0,1)"),
                ("1", "3", "(2,0)"),
            ],
        );
        let r = run_lattice(&p, &edb, &spec).unwrap();
        assert_eq!(
            r.values,
            naive_fixpoint(&p, &edb, &spec, None).unwrap().values
        );
        assert_eq!(
            r.value(&Fact::syms("path", &["1", "3"])),
            spec.parse_value("(1,0)").ok().as_ref()
        );
    }
}
