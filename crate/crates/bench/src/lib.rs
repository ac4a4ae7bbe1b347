//! Fixed benchmark inputs, so every run times the same instances.

use dlprov_core::generators::{chain_graph, random_graph, Instance};
use dlprov_core::SemiringSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random transitive-closure instance with `2 * nodes` arcs.
pub fn random_tc(nodes: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph(&mut rng, &SemiringSpec::tropical(), nodes, 2 * nodes)
}

/// Random transitive closure over a set lattice with three tokens.
pub fn random_lattice_tc(nodes: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = SemiringSpec::set_lattice(["a", "b", "c"]).expect("small universe");
    random_graph(&mut rng, &spec, nodes, 2 * nodes)
}

pub fn chain(len: usize) -> Instance {
    chain_graph(len)
}
