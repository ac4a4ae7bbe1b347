//! Semiring provenance for positive Datalog.
//!
//! Programs are parsed by [`frontend`], grounded against an interned fact
//! store by [`grounding`], and evaluated by one of the strategies in
//! [`engine`]. The [`hypergraph`] and [`translations`] modules relate
//! programs to weighted hypergraphs in both directions, and [`oracle`] holds
//! brute-force reference implementations used to cross-check everything.

pub mod engine;
pub mod frontend;
pub mod generators;
pub mod grounding;
pub mod hypergraph;
pub mod oracle;
pub mod semiring;
pub mod translations;

pub use engine::{evaluate, EvalError, EvalReport, Stats, Strategy};
pub use frontend::{parse_program, AnnotatedFact, Atom, Fact, Program, Rule};
pub use hypergraph::{Derivation, WeightedHypergraph};
pub use semiring::{Properties, SemiringError, SemiringKind, SemiringSpec, Tropical, Value};
