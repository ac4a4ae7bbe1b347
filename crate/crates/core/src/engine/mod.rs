//! Evaluation strategies.
//!
//! All strategies return the same value map on the semirings they accept:
//! every derived (IDB) atom with a non-zero value. EDB atoms are inputs and
//! are not reported.

mod best_first;
mod lattice;
mod naive;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::frontend::{AnnotatedFact, Fact, Program};
use crate::grounding::{Grounder, GroundingError};
use crate::semiring::{Properties, SemiringError, SemiringSpec, Value};

pub use best_first::{best_first_seminaive, run_stratified};
pub use lattice::run_lattice;
pub use naive::{best_first_naive, naive_fixpoint};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("no fixpoint after {rounds} rounds; `{atom}` still changing")]
    Divergence { rounds: u64, atom: String },
    #[error("strategy `{strategy}` does not support the {semiring} semiring: {reason}")]
    Unsupported {
        strategy: Strategy,
        semiring: String,
        reason: String,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Naive,
    BestFirst,
    Seminaive,
    Stratified,
    Lattice,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Naive,
        Strategy::BestFirst,
        Strategy::Seminaive,
        Strategy::Stratified,
        Strategy::Lattice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::BestFirst => "best-first",
            Strategy::Seminaive => "seminaive",
            Strategy::Stratified => "stratified",
            Strategy::Lattice => "lattice",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Strategy::ALL.iter().map(|s| s.name()).collect();
                format!(
                    "unknown strategy `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Exact event counts of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub extractions: u64,
    pub rule_instantiations: u64,
    pub queue_pushes: u64,
    pub stale_pops: u64,
    pub kleene_rounds: u64,
}

impl Stats {
    fn add(&mut self, other: &Stats) {
        self.extractions += other.extractions;
        self.rule_instantiations += other.rule_instantiations;
        self.queue_pushes += other.queue_pushes;
        self.stale_pops += other.stale_pops;
        self.kleene_rounds += other.kleene_rounds;
    }

    pub fn entries(&self) -> [(&'static str, u64); 5] {
        [
            ("extractions", self.extractions),
            ("rule_instantiations", self.rule_instantiations),
            ("queue_pushes", self.queue_pushes),
            ("stale_pops", self.stale_pops),
            ("kleene_rounds", self.kleene_rounds),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalReport {
    pub strategy: Strategy,
    /// Derived atoms with their values; never contains `zero()`.
    pub values: BTreeMap<Fact, Value>,
    pub stats: Stats,
    /// Per-dimension runs of the lattice strategy.
    pub dimensions: Option<Vec<EvalReport>>,
    /// Atoms in the order they were settled, with their values at that time.
    /// Empty for strategies without a settled set.
    pub settle_order: Vec<(Fact, Value)>,
}

impl EvalReport {
    pub fn value(&self, fact: &Fact) -> Option<&Value> {
        self.values.get(fact)
    }

    /// Facts of `relation` with values, in fact order.
    pub fn relation<'a>(
        &'a self,
        relation: &'a str,
    ) -> impl Iterator<Item = (&'a Fact, &'a Value)> {
        self.values
            .iter()
            .filter(move |(f, _)| f.relation == relation)
    }
}

/// Runs `strategy` with its default parameters.
pub fn evaluate(
    strategy: Strategy,
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<EvalReport, EvalError> {
    match strategy {
        Strategy::Naive => naive_fixpoint(program, edb, spec, None),
        Strategy::BestFirst => best_first_naive(program, edb, spec),
        Strategy::Seminaive => best_first_seminaive(program, edb, spec),
        Strategy::Stratified => run_stratified(program, edb, spec),
        Strategy::Lattice => run_lattice(program, edb, spec),
    }
}

/// Best-first strategies need a priority order that is the natural order.
fn require_best_first(strategy: Strategy, spec: &SemiringSpec) -> Result<(), EvalError> {
    let unsupported = |reason: &str| EvalError::Unsupported {
        strategy,
        semiring: spec.header(),
        reason: reason.to_string(),
    };
    if !spec.has(Properties::ZERO_CLOSED) {
        return Err(unsupported("not 0-closed"));
    }
    if !spec.has(Properties::TOTALLY_ORDERED) || spec.priority_key(&spec.one()).is_err() {
        return Err(unsupported("not totally ordered"));
    }
    Ok(())
}

fn grounder(
    program: &Program,
    edb: &[AnnotatedFact],
    spec: &SemiringSpec,
) -> Result<Grounder, EvalError> {
    let mut g = Grounder::new(program, spec.clone())?;
    g.load_edb(edb)?;
    Ok(g)
}

/// IDB atoms of the store with non-zero values; with `settled_only`, only
/// those in the settled set.
fn collect_values(g: &Grounder, settled_only: bool) -> BTreeMap<Fact, Value> {
    let store = g.store();
    let spec = g.spec();
    store
        .atom_ids()
        .filter(|&id| !settled_only || store.is_settled(id))
        .filter(|&id| !spec.is_zero(store.value(id)))
        .filter(|&id| {
            !g.program()
                .is_edb(store.relation_name(store.relation_of(id)))
        })
        .map(|id| (store.fact(id), store.value(id).clone()))
        .collect()
}

/// Writes a tab-separated `<relation>.csv` for every output relation and a
/// `stats.txt` with the counters.
pub fn write_outputs(
    report: &EvalReport,
    program: &Program,
    spec: &SemiringSpec,
    dir: &Path,
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for name in &program.outputs {
        let mut text = String::new();
        for (fact, value) in report.relation(name) {
            let row = AnnotatedFact::new(fact.clone(), value.clone());
            text.push_str(&row.to_row(spec));
            text.push('\n');
        }
        fs::write(dir.join(format!("{name}.csv")), text)?;
    }
    fs::write(dir.join("stats.txt"), stats_text(report))
}

pub fn stats_text(report: &EvalReport) -> String {
    let mut text = format!("strategy\t{}\n", report.strategy);
    for (k, v) in report.stats.entries() {
        text.push_str(&format!("{k}\t{v}\n"));
    }
    text.push_str(&format!("atoms\t{}\n", report.values.len()));
    text
}
