use std::collections::BTreeMap;

use dlprov_core::engine::{
    best_first_naive, best_first_seminaive, naive_fixpoint, run_lattice, run_stratified,
};
use dlprov_core::frontend::{load_facts, parse_program, Fact};
use dlprov_core::generators::{
    random_graph, random_hypergraph, random_program, random_set_lattice, small_graph,
};
use dlprov_core::hypergraph::{
    best_weight_by_enumeration, format_hypergraph, from_program, parse_hypergraph,
};
use dlprov_core::oracle::{prov_all, tropical_tc_reference, DEFAULT_BOUND};
use dlprov_core::semiring::{cmp_natural, Properties, SemiringSpec, Tropical, Value};
use dlprov_core::translations::{hg_to_datalog_fixed, hg_to_datalog_simple, r_fact};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn builtins() -> Vec<SemiringSpec> {
    vec![
        SemiringSpec::tropical(),
        SemiringSpec::boolean(),
        SemiringSpec::counting(),
        SemiringSpec::set_lattice(["a", "b", "c", "d"]).unwrap(),
        SemiringSpec::chain_product(vec![3, 2]).unwrap(),
    ]
}

fn tropical_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::infinity()),
        (0u64..1000, 1u64..12).prop_map(|(n, d)| Value::Tropical(Tropical::ratio(n, d))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semiring_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        for s in builtins() {
            for _ in 0..16 {
                let (a, b, c) = (s.sample(&mut r), s.sample(&mut r), s.sample(&mut r));
                let (p, t) = (|x: &Value, y: &Value| s.plus(x, y).unwrap(), |x: &Value, y: &Value| s.times(x, y).unwrap());
                prop_assert_eq!(p(&p(&a, &b), &c), p(&a, &p(&b, &c)));
                prop_assert_eq!(t(&t(&a, &b), &c), t(&a, &t(&b, &c)));
                prop_assert_eq!(p(&a, &b), p(&b, &a));
                prop_assert_eq!(t(&a, &p(&b, &c)), p(&t(&a, &b), &t(&a, &c)));
                prop_assert_eq!(t(&p(&a, &b), &c), p(&t(&a, &c), &t(&b, &c)));
                prop_assert_eq!(t(&s.zero(), &a), s.zero());
                prop_assert_eq!(t(&s.one(), &a), a.clone());
                prop_assert_eq!(p(&s.zero(), &a), a.clone());
                if s.has(Properties::ZERO_CLOSED) {
                    let leq = |x: &Value, y: &Value| s.natural_leq(x, y).unwrap();
                    let ab = t(&a, &b);
                    prop_assert!(leq(&a, &ab) && leq(&b, &ab));
                    prop_assert!(leq(&s.one(), &a) && leq(&a, &s.zero()));
                    if leq(&a, &b) {
                        prop_assert!(leq(&p(&a, &c), &p(&b, &c)));
                        prop_assert!(leq(&t(&a, &c), &t(&b, &c)));
                    }
                }
            }
        }
    }

    #[test]
    fn tropical_literals_round_trip(v in tropical_value()) {
        let s = SemiringSpec::tropical();
        prop_assert_eq!(s.parse_value(&s.format_value(&v)).unwrap(), v);
    }

    #[test]
    fn sampled_literals_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for s in builtins() {
            let v = s.sample(&mut r);
            prop_assert_eq!(s.parse_value(&s.format_value(&v)).unwrap(), v);
        }
    }

    #[test]
    fn program_text_round_trips(seed in any::<u64>()) {
        let inst = random_program(&mut rng(seed), &SemiringSpec::tropical());
        let text = inst.program.to_string();
        prop_assert_eq!(parse_program(&text).unwrap(), inst.program);
    }

    #[test]
    fn fact_loading_ignores_row_order(
        rows in prop::collection::vec((0u8..3, 0u8..3, 0u64..20), 0..12),
        perm in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let p = parse_program(dlprov_core::generators::TC_PROGRAM).unwrap();
        let decl = p.decl("edge").unwrap();
        let s = SemiringSpec::tropical();
        let line = |&(a, b, w): &(u8, u8, u64)| format!("n{a}\tn{b}\t{w}\n");
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng(perm));
        let load = |rows: &[(u8, u8, u64)]| -> BTreeMap<Fact, Value> {
            let text: String = rows.iter().map(line).collect();
            load_facts(&text, decl, &s).unwrap().into_iter().map(|f| (f.fact, f.annotation)).collect()
        };
        prop_assert_eq!(load(&rows), load(&shuffled));
    }

    #[test]
    fn strategies_agree_with_each_other_and_the_oracle(seed in any::<u64>(), boolean in any::<bool>()) {
        let spec = if boolean { SemiringSpec::boolean() } else { SemiringSpec::tropical() };
        let mut r = rng(seed);
        for inst in [small_graph(&mut r, &spec), random_program(&mut r, &spec)] {
            let (p, e) = (&inst.program, inst.edb.as_slice());
            let naive = naive_fixpoint(p, e, &spec, None).unwrap();
            let bf = best_first_naive(p, e, &spec).unwrap();
            let semi = best_first_seminaive(p, e, &spec).unwrap();
            let strat = run_stratified(p, e, &spec).unwrap();
            prop_assert_eq!(&naive.values, &bf.values);
            prop_assert_eq!(&naive.values, &semi.values);
            prop_assert_eq!(&naive.values, &strat.values);
            prop_assert_eq!(&naive.values, &prov_all(p, e, &spec, DEFAULT_BOUND).unwrap());
            prop_assert!(semi.stats.rule_instantiations <= bf.stats.rule_instantiations);
        }
    }

    #[test]
    fn settlement_is_monotone_and_final(seed in any::<u64>()) {
        let spec = SemiringSpec::tropical();
        let mut r = rng(seed);
        let inst = random_graph(&mut r, &spec, 10, 25);
        let run = best_first_seminaive(&inst.program, &inst.edb, &spec).unwrap();
        for w in run.settle_order.windows(2) {
            prop_assert!(cmp_natural(&spec, &w[0].1, &w[1].1).unwrap().is_le());
        }
        for (f, v) in &run.settle_order {
            prop_assert_eq!(run.value(f), Some(v));
        }
        prop_assert_eq!(run.settle_order.len(), run.values.len());
    }

    #[test]
    fn oracles_agree_on_graphs(seed in any::<u64>()) {
        let spec = SemiringSpec::tropical();
        let inst = small_graph(&mut rng(seed), &spec);
        let edges: Vec<(String, String, Tropical)> = inst
            .edb
            .iter()
            .map(|f| (f.fact.args[0].raw(), f.fact.args[1].raw(), f.annotation.as_tropical().unwrap()))
            .collect();
        let fw: BTreeMap<Fact, Value> = tropical_tc_reference(&edges)
            .into_iter()
            .map(|((a, b), d)| (Fact::syms("path", &[&a, &b]), Value::Tropical(d)))
            .collect();
        prop_assert_eq!(prov_all(&inst.program, &inst.edb, &spec, DEFAULT_BOUND).unwrap(), fw);
    }

    #[test]
    fn lattice_equals_naive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = random_set_lattice(&mut r);
        let inst = random_graph(&mut r, &spec, 5, 8);
        let naive = naive_fixpoint(&inst.program, &inst.edb, &spec, None).unwrap();
        let lat = run_lattice(&inst.program, &inst.edb, &spec).unwrap();
        prop_assert_eq!(naive.values, lat.values);
    }

    #[test]
    fn hypergraph_translations_preserve_best_weight(seed in any::<u64>(), boolean in any::<bool>()) {
        let spec = if boolean { SemiringSpec::boolean() } else { SemiringSpec::tropical() };
        let h = random_hypergraph(&mut rng(seed), &spec, 12, 3);
        prop_assert_eq!(&parse_hypergraph(&format_hypergraph(&h)).unwrap(), &h);
        let simple = hg_to_datalog_simple(&h);
        let fixed = hg_to_datalog_fixed(&h).unwrap();
        let rs = best_first_seminaive(&simple.program, &simple.facts, &spec).unwrap();
        let rf = best_first_seminaive(&fixed.program, &fixed.facts, &spec).unwrap();
        let back = from_program(&simple.program, &simple.facts, &spec).unwrap();
        for v in h.vertices() {
            let want = best_weight_by_enumeration(&h, v).unwrap();
            let atom = r_fact(h.label(v));
            let zero = spec.zero();
            prop_assert_eq!(rs.value(&atom).unwrap_or(&zero), &want);
            prop_assert_eq!(rf.value(&atom).unwrap_or(&zero), &want);
            let round = match back.vertex(&atom.to_string()) {
                Some(u) => best_weight_by_enumeration(&back, u).unwrap(),
                None => zero.clone(),
            };
            prop_assert_eq!(round, want);
        }
    }

    #[test]
    fn from_program_matches_engine(seed in any::<u64>()) {
        let spec = SemiringSpec::tropical();
        let inst = random_program(&mut rng(seed), &spec);
        let h = from_program(&inst.program, &inst.edb, &spec).unwrap();
        let run = best_first_seminaive(&inst.program, &inst.edb, &spec).unwrap();
        for (f, v) in &run.values {
            let u = h.vertex(&f.to_string()).unwrap();
            prop_assert_eq!(&best_weight_by_enumeration(&h, u).unwrap(), v);
        }
    }
}

/// Decomposition is a bijection and a homomorphism on every pair of values of
/// small set lattices.
#[test]
fn lattice_decomposition_exhaustive() {
    for n in 1..=4 {
        let s = SemiringSpec::set_lattice((0..n).map(|i| format!("t{i}"))).unwrap();
        let all = s.enumerate().unwrap();
        assert_eq!(all.len(), 1 << n);
        for a in &all {
            let da = s.decompose(a).unwrap();
            assert_eq!(&s.recompose(&da).unwrap(), a);
            for b in &all {
                let db = s.decompose(b).unwrap();
                for (op, joint) in [(0, s.plus(a, b).unwrap()), (1, s.times(a, b).unwrap())] {
                    let coords: Vec<Value> = (0..n)
                        .map(|i| {
                            let d = s.dimension_spec(i).unwrap();
                            if op == 0 {
                                d.plus(&da[i], &db[i])
                            } else {
                                d.times(&da[i], &db[i])
                            }
                            .unwrap()
                        })
                        .collect();
                    assert_eq!(s.decompose(&joint).unwrap(), coords);
                }
            }
        }
    }
}
