use std::fmt;

use num_rational::Ratio;

/// Element of the tropical carrier: a non-negative exact rational or infinity.
///
/// The derived ordering puts every finite value below `Infinity`, which is the
/// natural order of `(min, +)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tropical {
    Finite(Ratio<u64>),
    Infinity,
}

impl Tropical {
    pub fn int(n: u64) -> Self {
        Tropical::Finite(Ratio::from_integer(n))
    }

    pub fn ratio(numer: u64, denom: u64) -> Self {
        Tropical::Finite(Ratio::new(numer, denom))
    }
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tropical::Infinity => f.write_str("inf"),
            Tropical::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Tropical::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// Subset of a declared token universe, stored as a bitmask over universe
/// positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TokenSet(pub u64);

impl TokenSet {
    pub fn full(universe_len: usize) -> Self {
        if universe_len >= 64 {
            TokenSet(u64::MAX)
        } else {
            TokenSet((1u64 << universe_len) - 1)
        }
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn with(self, index: usize) -> Self {
        TokenSet(self.0 | (1 << index))
    }
}

/// A semiring element. Which variant is valid is determined by the owning
/// [`SemiringSpec`](super::SemiringSpec); equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Tropical(Tropical),
    Bool(bool),
    Set(TokenSet),
    /// One position per chain of a product-of-chains lattice.
    Chain(Vec<u32>),
    Nat(u64),
}

impl Value {
    pub fn tropical(n: u64) -> Self {
        Value::Tropical(Tropical::int(n))
    }

    pub fn infinity() -> Self {
        Value::Tropical(Tropical::Infinity)
    }

    pub fn as_tropical(&self) -> Option<Tropical> {
        match self {
            Value::Tropical(t) => Some(*t),
            _ => None,
        }
    }

    pub(crate) fn variant_name(&self) -> &'static str {
        match self {
            Value::Tropical(_) => "tropical",
            Value::Bool(_) => "boolean",
            Value::Set(_) => "set",
            Value::Chain(_) => "chain",
            Value::Nat(_) => "natural",
        }
    }
}
