//! Brute-force reference implementations.
//!
//! Nothing here shares code with the grounder or the engine: provenance is
//! computed top-down over proof trees with substitutions drawn from the
//! active domain, and transitive closure by Floyd–Warshall.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::frontend::{AnnotatedFact, Constant, Fact, Program, Rule, Term};
use crate::semiring::{Properties, SemiringError, SemiringSpec, Tropical, Value};

/// Default cap on the number of candidate IDB atoms.
pub const DEFAULT_BOUND: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle instance too large: {atoms} candidate atoms exceed the bound {bound}")]
    TooLarge { atoms: usize, bound: usize },
    #[error("enumeration is only exact for 0-closed semirings, not {0}")]
    NotZeroClosed(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

struct Universe<'a> {
    program: &'a Program,
    spec: &'a SemiringSpec,
    edb: HashMap<Fact, Value>,
    domain: Vec<Constant>,
    ids: HashMap<Fact, usize>,
}

impl<'a> Universe<'a> {
    fn new(
        program: &'a Program,
        edb: &[AnnotatedFact],
        spec: &'a SemiringSpec,
        bound: usize,
    ) -> Result<Self, OracleError> {
        let mut facts: HashMap<Fact, Value> = HashMap::new();
        let mut domain = BTreeSet::new();
        for f in edb {
            domain.extend(f.fact.args.iter().cloned());
            let v = match facts.get(&f.fact) {
                Some(old) => spec.plus(old, &f.annotation)?,
                None => f.annotation.clone(),
            };
            facts.insert(f.fact.clone(), v);
        }
        for rule in &program.rules {
            for atom in std::iter::once(&rule.head).chain(&rule.body) {
                for t in &atom.terms {
                    if let Term::Const(c) = t {
                        domain.insert(c.clone());
                    }
                }
            }
        }
        let domain: Vec<Constant> = domain.into_iter().collect();
        let atoms: usize = program
            .idb_relations()
            .map(|d| domain.len().saturating_pow(d.arity() as u32))
            .fold(0usize, usize::saturating_add);
        if atoms > bound {
            return Err(OracleError::TooLarge { atoms, bound });
        }
        Ok(Universe {
            program,
            spec,
            edb: facts,
            domain,
            ids: HashMap::new(),
        })
    }

    fn id(&mut self, f: &Fact) -> usize {
        let n = self.ids.len();
        *self.ids.entry(f.clone()).or_insert(n)
    }

    fn edb_value(&self, f: &Fact) -> Value {
        self.edb.get(f).cloned().unwrap_or_else(|| self.spec.zero())
    }

    /// Every IDB atom over the active domain.
    fn candidates(&self) -> Vec<Fact> {
        let mut out = Vec::new();
        for d in self.program.idb_relations() {
            if self.domain.is_empty() && d.arity() > 0 {
                continue;
            }
            let mut args = vec![0usize; d.arity()];
            loop {
                out.push(Fact::new(
                    &d.name,
                    args.iter().map(|&i| self.domain[i].clone()).collect(),
                ));
                let mut i = 0;
                while i < args.len() {
                    args[i] += 1;
                    if args[i] < self.domain.len() {
                        break;
                    }
                    args[i] = 0;
                    i += 1;
                }
                if i == args.len() {
                    break;
                }
            }
        }
        out
    }

    /// Ground bodies of `rule` whose head is `head`, with substitutions over
    /// the active domain.
    fn bodies(&self, rule: &Rule, head: &Fact) -> Vec<Vec<Fact>> {
        if rule.head.relation != head.relation {
            return Vec::new();
        }
        let mut env: BTreeMap<&str, Constant> = BTreeMap::new();
        for (t, c) in rule.head.terms.iter().zip(&head.args) {
            match t {
                Term::Const(k) if k != c => return Vec::new(),
                Term::Const(_) => {}
                Term::Var(v) => {
                    if let Some(b) = env.get(v.as_str()) {
                        if b != c {
                            return Vec::new();
                        }
                    } else {
                        env.insert(v, c.clone());
                    }
                }
            }
        }
        let mut free: Vec<&str> = Vec::new();
        for a in &rule.body {
            for v in a.variables() {
                if !env.contains_key(v) && !free.contains(&v) {
                    free.push(v);
                }
            }
        }
        let mut out = Vec::new();
        self.assign(rule, &free, &mut env, &mut out);
        out
    }

    /// Binds `free` one at a time, dropping assignments as soon as a fully
    /// bound EDB body atom is absent.
    fn assign<'r>(
        &self,
        rule: &'r Rule,
        free: &[&'r str],
        env: &mut BTreeMap<&'r str, Constant>,
        out: &mut Vec<Vec<Fact>>,
    ) {
        for a in &rule.body {
            if self.program.is_edb(&a.relation) && a.variables().all(|v| env.contains_key(v)) {
                let f = ground(a, env);
                if self.spec.is_zero(&self.edb_value(&f)) {
                    return;
                }
            }
        }
        let Some((first, rest)) = free.split_first() else {
            out.push(rule.body.iter().map(|a| ground(a, env)).collect());
            return;
        };
        for c in &self.domain {
            env.insert(first, c.clone());
            self.assign(rule, rest, env, out);
        }
        env.remove(first);
    }
}

fn ground(a: &crate::frontend::Atom, env: &BTreeMap<&str, Constant>) -> Fact {
    Fact::new(
        &a.relation,
        a.terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => env[v.as_str()].clone(),
            })
            .collect(),
    )
}

struct Prov<'a> {
    u: Universe<'a>,
    memo: HashMap<(usize, Vec<usize>), Value>,
}

impl Prov<'_> {
    /// `⊕` over proof trees of `f` that repeat no atom on a root-to-leaf path
    /// and avoid `path`, of the `⊗` of their leaf annotations. The sum over
    /// trees is taken one rule instance at a time, by distributivity.
    fn prov(&mut self, f: &Fact, path: &[usize]) -> Result<Value, OracleError> {
        if self.u.program.is_edb(&f.relation) {
            return Ok(self.u.edb_value(f));
        }
        let id = self.u.id(f);
        let key = (id, path.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let mut inner = path.to_vec();
        inner.push(id);
        inner.sort_unstable();
        let spec = self.u.spec;
        let mut acc = spec.zero();
        let program = self.u.program;
        for rule in &program.rules {
            'bodies: for body in self.u.bodies(rule, f) {
                let mut prod = spec.one();
                for b in &body {
                    if !program.is_edb(&b.relation) {
                        let bid = self.u.id(b);
                        if inner.binary_search(&bid).is_ok() {
                            continue 'bodies;
                        }
                    }
                    let v = self.prov(b, &inner)?;
                    prod = spec.times(&prod, &v)?;
                    if spec.is_zero(&prod) {
                        continue 'bodies;
                    }
                }
                acc = spec.plus(&acc, &prod)?;
            }
        }
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }
}

fn require_zero_closed(spec: &SemiringSpec) -> Result<(), OracleError> {
    if spec.has(Properties::ZERO_CLOSED) {
        Ok(())
    } else {
        Err(OracleError::NotZeroClosed(spec.header()))
    }
}

/// Provenance of `atom` by proof-tree enumeration; `zero()` if no tree
/// exists. EDB atoms yield their annotation.
pub fn prov_by_enumeration(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
    atom: &Fact,
    bound: usize,
) -> Result<Value, OracleError> {
    require_zero_closed(spec)?;
    let mut p = Prov {
        u: Universe::new(program, edb, spec, bound)?,
        memo: HashMap::new(),
    };
    p.prov(atom, &[])
}

/// [`prov_by_enumeration`] for every IDB atom over the active domain, keeping
/// the non-zero ones.
pub fn prov_all(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
    bound: usize,
) -> Result<BTreeMap<Fact, Value>, OracleError> {
    require_zero_closed(spec)?;
    let mut p = Prov {
        u: Universe::new(program, edb, spec, bound)?,
        memo: HashMap::new(),
    };
    let mut out = BTreeMap::new();
    for f in p.u.candidates() {
        let v = p.prov(&f, &[])?;
        if !spec.is_zero(&v) {
            out.insert(f, v);
        }
    }
    Ok(out)
}

/// Number of proof trees of `atom` of each size `0..=max_size`, where size
/// counts nodes and an EDB leaf is one node. Leaves annotated `zero()` do not
/// count. Trees may repeat atoms along a path.
pub fn count_proof_trees(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
    atom: &Fact,
    max_size: usize,
    bound: usize,
) -> Result<Vec<u64>, OracleError> {
    let u = Universe::new(program, edb, spec, bound)?;
    let mut memo: HashMap<(Fact, usize), u64> = HashMap::new();
    Ok((0..=max_size)
        .map(|s| count(&u, atom, s, &mut memo))
        .collect())
}

fn count(u: &Universe, f: &Fact, size: usize, memo: &mut HashMap<(Fact, usize), u64>) -> u64 {
    if u.program.is_edb(&f.relation) {
        return u64::from(size == 1 && !u.spec.is_zero(&u.edb_value(f)));
    }
    if size < 2 {
        return 0;
    }
    if let Some(&n) = memo.get(&(f.clone(), size)) {
        return n;
    }
    let mut total = 0u64;
    for rule in &u.program.rules {
        for body in u.bodies(rule, f) {
            total += split(u, &body, size - 1, memo);
        }
    }
    memo.insert((f.clone(), size), total);
    total
}

/// Ways to build trees for every atom of `body` with sizes summing to `size`.
fn split(u: &Universe, body: &[Fact], size: usize, memo: &mut HashMap<(Fact, usize), u64>) -> u64 {
    let Some((first, rest)) = body.split_first() else {
        return u64::from(size == 0);
    };
    let mut total = 0;
    for s in 1..=size.saturating_sub(rest.len()) {
        let here = count(u, first, s, memo);
        if here > 0 {
            total += here * split(u, rest, size - s, memo);
        }
    }
    total
}

/// Shortest distances over paths of at least one edge, by Floyd–Warshall.
/// Parallel edges keep the lighter weight; `inf` edges are ignored.
pub fn tropical_tc_reference(
    edges: &[(String, String, Tropical)],
) -> BTreeMap<(String, String), Tropical> {
    let mut nodes: BTreeSet<&str> = BTreeSet::new();
    for (a, b, _) in edges {
        nodes.insert(a);
        nodes.insert(b);
    }
    let nodes: Vec<&str> = nodes.into_iter().collect();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let n = nodes.len();
    let mut d = vec![vec![Tropical::Infinity; n]; n];
    for (a, b, w) in edges {
        let (i, j) = (index[a.as_str()], index[b.as_str()]);
        d[i][j] = d[i][j].min(*w);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == Tropical::Infinity {
                continue;
            }
            for j in 0..n {
                if let (Tropical::Finite(x), Tropical::Finite(y)) = (d[i][k], d[k][j]) {
                    d[i][j] = d[i][j].min(Tropical::Finite(x + y));
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if d[i][j] != Tropical::Infinity {
                out.insert((nodes[i].to_string(), nodes[j].to_string()), d[i][j]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    const TC: &str = "
        .decl edge(x:symbol, y:symbol, @prov)
        .decl path(x:symbol, y:symbol, @prov)
        .input edge
        path(x, y) :- edge(x, y).
        path(x, y) :- path(x, z), edge(z, y).
    ";

    fn edb(spec: &SemiringSpec, list: &[(&str, &str, &str)]) -> Vec<AnnotatedFact> {
        list.iter()
            .map(|(a, b, w)| {
                AnnotatedFact::new(Fact::syms("edge", &[a, b]), spec.parse_value(w).unwrap())
            })
            .collect()
    }

    fn paris() -> Vec<AnnotatedFact> {
        edb(
            &SemiringSpec::tropical(),
            &[
                ("Paris", "London", "3"),
                ("Paris", "Lille", "1"),
                ("Lille", "London", "0"),
            ],
        )
    }

    #[test]
    fn paris_london() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::tropical();
        let v = prov_by_enumeration(
            &p,
            &paris(),
            &spec,
            &Fact::syms("path", &["Paris", "London"]),
            DEFAULT_BOUND,
        );
        assert_eq!(v, Ok(Value::tropical(1)));
        let none = prov_by_enumeration(
            &p,
            &paris(),
            &spec,
            &Fact::syms("path", &["London", "Paris"]),
            DEFAULT_BOUND,
        );
        assert_eq!(none, Ok(Value::infinity()));
    }

    #[test]
    fn three_cycle_reachability() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::boolean();
        let e = edb(
            &spec,
            &[("a", "b", "true"), ("b", "c", "true"), ("c", "a", "true")],
        );
        let all = prov_all(&p, &e, &spec, DEFAULT_BOUND).unwrap();
        assert_eq!(all.len(), 9);
        assert!(all.values().all(|v| *v == Value::Bool(true)));
        // Matrix closure of the same graph.
        let reach = tropical_tc_reference(
            &[("a", "b"), ("b", "c"), ("c", "a")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string(), Tropical::int(0)))
                .collect::<Vec<_>>(),
        );
        assert_eq!(reach.len(), 9);
    }

    #[test]
    fn floyd_warshall_examples() {
        let e = |a: &str, b: &str, w: u64| (a.to_string(), b.to_string(), Tropical::int(w));
        let d = tropical_tc_reference(&[e("P", "Lo", 3), e("P", "Li", 1), e("Li", "Lo", 0)]);
        let want: BTreeMap<(String, String), Tropical> = [
            (("Li".to_string(), "Lo".to_string()), Tropical::int(0)),
            (("P".to_string(), "Li".to_string()), Tropical::int(1)),
            (("P".to_string(), "Lo".to_string()), Tropical::int(1)),
        ]
        .into();
        assert_eq!(d, want);
        assert_eq!(tropical_tc_reference(&[e("a", "b", 5)]).len(), 1);
        let chain: Vec<_> = (0..20)
            .map(|i| e(&i.to_string(), &(i + 1).to_string(), 1))
            .collect();
        let d = tropical_tc_reference(&chain);
        assert_eq!(d.len(), 210);
        for ((a, b), w) in d {
            let (a, b): (u64, u64) = (a.parse().unwrap(), b.parse().unwrap());
            assert_eq!(w, Tropical::int(b - a));
        }
    }

    #[test]
    fn proof_tree_counts() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::tropical();
        let counts = count_proof_trees(
            &p,
            &paris(),
            &spec,
            &Fact::syms("path", &["Paris", "London"]),
            6,
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(counts, [0, 0, 1, 0, 1, 0, 0]);
        // A self-loop gives one tree per size 2, 4, 6, ...
        let e = edb(&spec, &[("a", "a", "1")]);
        let counts = count_proof_trees(
            &p,
            &e,
            &spec,
            &Fact::syms("path", &["a", "a"]),
            7,
            DEFAULT_BOUND,
        )
        .unwrap();
        assert_eq!(counts, [0, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn bound_and_semiring_checks() {
        let p = parse_program(TC).unwrap();
        let spec = SemiringSpec::tropical();
        let f = Fact::syms("path", &["Paris", "London"]);
        assert_eq!(
            prov_by_enumeration(&p, &paris(), &spec, &f, 4),
            Err(OracleError::TooLarge { atoms: 9, bound: 4 })
        );
        let counting = SemiringSpec::counting();
        assert!(matches!(
            prov_by_enumeration(&p, &[], &counting, &f, DEFAULT_BOUND),
            Err(OracleError::NotZeroClosed(_))
        ));
    }
}
