//! Semiring algebra: the built-in semirings, the natural order, randomized
//! law checking, and the chain decomposition of distributive lattices.
//!
//! All semirings share one runtime representation: a [`SemiringSpec`] that
//! selects the carrier and a [`Value`] enum for its elements. The engine is
//! written against this pair so that the semiring can be picked at run time.

mod properties;
mod value;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use bitflags::bitflags;
use num_rational::Ratio;
use num_traits::{CheckedAdd, Zero};
use rand::Rng;
use thiserror::Error;

pub use properties::{check_properties, LawCheck, PropertyReport};
pub use value::{TokenSet, Tropical, Value};

/// Largest set-lattice universe; sets are stored as a `u64` mask.
pub const MAX_UNIVERSE: usize = 64;

bitflags! {
    /// Algebraic properties a semiring declares about itself.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
    pub struct Properties: u8 {
        const COMMUTATIVE = 1;
        const IDEMPOTENT = 1 << 1;
        const ZERO_CLOSED = 1 << 2;
        const TOTALLY_ORDERED = 1 << 3;
        const MULT_IDEMPOTENT = 1 << 4;
    }
}

impl Properties {
    const NAMES: [(&'static str, Properties); 5] = [
        ("commutative", Properties::COMMUTATIVE),
        ("idempotent", Properties::IDEMPOTENT),
        ("zero_closed", Properties::ZERO_CLOSED),
        ("totally_ordered", Properties::TOTALLY_ORDERED),
        ("multiplicatively_idempotent", Properties::MULT_IDEMPOTENT),
    ];

    /// Parses a comma-separated list of property names. The empty string is
    /// the empty set.
    pub fn parse_list(text: &str) -> Result<Self, SemiringError> {
        let mut props = Properties::empty();
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (_, flag) = Self::NAMES
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| SemiringError::Config(format!("unknown property `{name}`")))?;
            props |= *flag;
        }
        Ok(props)
    }

    pub fn names(self) -> Vec<&'static str> {
        Self::NAMES
            .iter()
            .filter(|(_, f)| self.contains(*f))
            .map(|(n, _)| *n)
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("operand `{found}` does not belong to the {semiring} semiring")]
    Mixed { semiring: String, found: String },
    #[error("natural order is undefined: {0} is not declared idempotent")]
    UnsupportedOrder(String),
    #[error("{semiring} semiring does not support {what}")]
    Unsupported {
        semiring: String,
        what: &'static str,
    },
    #[error("cannot parse `{literal}` as a {semiring} value: {reason}")]
    Literal {
        semiring: String,
        literal: String,
        reason: String,
    },
    #[error("expected {expected} coordinates, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("arithmetic overflow in the {0} semiring")]
    Overflow(String),
    #[error("{0}")]
    Config(String),
}

/// The carrier and operations of a built-in semiring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SemiringKind {
    /// `(Q+ ∪ {∞}, min, +, ∞, 0)`.
    Tropical,
    /// `({true,false}, ∨, ∧, false, true)`.
    Boolean,
    /// `(2^X, ∩, ∪, X, ∅)`.
    SetLattice { universe: Vec<String> },
    /// Product of finite chains, positions `0..len`; plus is the coordinatewise
    /// minimum, times the maximum.
    ChainProduct { lengths: Vec<u32> },
    /// `(N, +, ×, 0, 1)`; not idempotent, kept for negative checks.
    Counting,
}

/// A semiring together with the properties it claims.
///
/// The declared properties normally match the kind; [`with_properties`]
/// exists so that misdeclarations can be exercised by the law checker.
///
/// [`with_properties`]: SemiringSpec::with_properties
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiringSpec {
    name: String,
    kind: SemiringKind,
    properties: Properties,
    k_closed: Option<u32>,
}

impl SemiringSpec {
    pub fn tropical() -> Self {
        SemiringSpec {
            name: "tropical".into(),
            kind: SemiringKind::Tropical,
            properties: Properties::COMMUTATIVE
                | Properties::IDEMPOTENT
                | Properties::ZERO_CLOSED
                | Properties::TOTALLY_ORDERED,
            k_closed: Some(0),
        }
    }

    pub fn boolean() -> Self {
        SemiringSpec {
            name: "boolean".into(),
            kind: SemiringKind::Boolean,
            properties: Properties::all(),
            k_closed: Some(0),
        }
    }

    pub fn counting() -> Self {
        SemiringSpec {
            name: "counting".into(),
            kind: SemiringKind::Counting,
            properties: Properties::COMMUTATIVE,
            k_closed: None,
        }
    }

    pub fn set_lattice<S: Into<String>>(
        universe: impl IntoIterator<Item = S>,
    ) -> Result<Self, SemiringError> {
        let universe: Vec<String> = universe.into_iter().map(Into::into).collect();
        if universe.is_empty() || universe.len() > MAX_UNIVERSE {
            return Err(SemiringError::Config(format!(
                "set lattice universe must hold 1..={MAX_UNIVERSE} tokens, got {}",
                universe.len()
            )));
        }
        for (i, tok) in universe.iter().enumerate() {
            if !is_token(tok) {
                return Err(SemiringError::Config(format!(
                    "invalid universe token `{tok}`"
                )));
            }
            if universe[..i].contains(tok) {
                return Err(SemiringError::Config(format!(
                    "duplicate universe token `{tok}`"
                )));
            }
        }
        let mut properties = lattice_properties();
        if universe.len() == 1 {
            properties |= Properties::TOTALLY_ORDERED;
        }
        Ok(SemiringSpec {
            name: "set-lattice".into(),
            kind: SemiringKind::SetLattice { universe },
            properties,
            k_closed: Some(0),
        })
    }

    pub fn chain_product(lengths: Vec<u32>) -> Result<Self, SemiringError> {
        if lengths.is_empty() || lengths.iter().any(|&l| l < 2) {
            return Err(SemiringError::Config(
                "chain product needs at least one chain, each of length >= 2".into(),
            ));
        }
        let mut properties = lattice_properties();
        if lengths.len() == 1 {
            properties |= Properties::TOTALLY_ORDERED;
        }
        Ok(SemiringSpec {
            name: "chain-product".into(),
            kind: SemiringKind::ChainProduct { lengths },
            properties,
            k_closed: Some(0),
        })
    }

    /// Single chain of the given length; the coordinate semiring of a lattice
    /// decomposition.
    pub fn chain(length: u32) -> Result<Self, SemiringError> {
        Self::chain_product(vec![length])
    }

    /// Builds a spec from its CLI name and optional parameters.
    pub fn from_name(
        name: &str,
        universe: Option<&[String]>,
        chains: Option<&[u32]>,
    ) -> Result<Self, SemiringError> {
        match name {
            "tropical" => Ok(Self::tropical()),
            "boolean" => Ok(Self::boolean()),
            "counting" => Ok(Self::counting()),
            "set-lattice" => {
                let universe = universe.ok_or_else(|| {
                    SemiringError::Config("set-lattice requires a universe".into())
                })?;
                Self::set_lattice(universe.iter().cloned())
            }
            "chain-product" => {
                let chains = chains.ok_or_else(|| {
                    SemiringError::Config("chain-product requires chain lengths".into())
                })?;
                Self::chain_product(chains.to_vec())
            }
            other => Err(SemiringError::Config(format!("unknown semiring `{other}`"))),
        }
    }

    /// Parses a `semiring` header: the name optionally followed by one
    /// comma-separated parameter list (universe or chain lengths).
    pub fn from_header(text: &str) -> Result<Self, SemiringError> {
        let mut parts = text.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| SemiringError::Config("missing semiring name".into()))?;
        let param = parts.next();
        if parts.next().is_some() {
            return Err(SemiringError::Config(format!("trailing text in `{text}`")));
        }
        let list: Option<Vec<String>> =
            param.map(|p| p.split(',').map(|s| s.trim().to_string()).collect());
        match name {
            "chain-product" => {
                let lengths = list
                    .unwrap_or_default()
                    .iter()
                    .map(|s| {
                        s.parse::<u32>()
                            .map_err(|_| SemiringError::Config(format!("bad chain length `{s}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Self::chain_product(lengths)
            }
            _ => Self::from_name(name, list.as_deref(), None),
        }
    }

    /// The inverse of [`from_header`](Self::from_header).
    pub fn header(&self) -> String {
        match &self.kind {
            SemiringKind::SetLattice { universe } => {
                format!("{} {}", self.name, universe.join(","))
            }
            SemiringKind::ChainProduct { lengths } => {
                let l: Vec<String> = lengths.iter().map(u32::to_string).collect();
                format!("{} {}", self.name, l.join(","))
            }
            _ => self.name.clone(),
        }
    }

    /// Replaces the declared properties; the operations are unchanged.
    pub fn with_properties(mut self, properties: Properties) -> Self {
        self.properties = properties;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SemiringKind {
        &self.kind
    }

    pub fn properties(&self) -> Properties {
        self.properties
    }

    pub fn has(&self, p: Properties) -> bool {
        self.properties.contains(p)
    }

    pub fn k_closed(&self) -> Option<u32> {
        self.k_closed
    }

    /// Number of chain coordinates, present iff the semiring is a decomposable
    /// distributive lattice.
    pub fn lattice_dims(&self) -> Option<usize> {
        match &self.kind {
            SemiringKind::Boolean => Some(1),
            SemiringKind::SetLattice { universe } => Some(universe.len()),
            SemiringKind::ChainProduct { lengths } => Some(lengths.len()),
            SemiringKind::Tropical | SemiringKind::Counting => None,
        }
    }

    pub fn zero(&self) -> Value {
        match &self.kind {
            SemiringKind::Tropical => Value::Tropical(Tropical::Infinity),
            SemiringKind::Boolean => Value::Bool(false),
            SemiringKind::SetLattice { universe } => Value::Set(TokenSet::full(universe.len())),
            SemiringKind::ChainProduct { lengths } => {
                Value::Chain(lengths.iter().map(|l| l - 1).collect())
            }
            SemiringKind::Counting => Value::Nat(0),
        }
    }

    pub fn one(&self) -> Value {
        match &self.kind {
            SemiringKind::Tropical => Value::tropical(0),
            SemiringKind::Boolean => Value::Bool(true),
            SemiringKind::SetLattice { .. } => Value::Set(TokenSet::default()),
            SemiringKind::ChainProduct { lengths } => Value::Chain(vec![0; lengths.len()]),
            SemiringKind::Counting => Value::Nat(1),
        }
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero()
    }

    /// Whether `v` is an element of this semiring's carrier.
    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (SemiringKind::Tropical, Value::Tropical(_))
            | (SemiringKind::Boolean, Value::Bool(_))
            | (SemiringKind::Counting, Value::Nat(_)) => true,
            (SemiringKind::SetLattice { universe }, Value::Set(s)) => {
                s.0 & !TokenSet::full(universe.len()).0 == 0
            }
            (SemiringKind::ChainProduct { lengths }, Value::Chain(c)) => {
                c.len() == lengths.len() && c.iter().zip(lengths).all(|(p, l)| p < l)
            }
            _ => false,
        }
    }

    fn check(&self, v: &Value) -> Result<(), SemiringError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(SemiringError::Mixed {
                semiring: self.header(),
                found: format!("{}:{:?}", v.variant_name(), v),
            })
        }
    }

    /// `a ⊕ b`.
    pub fn plus(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Value::Tropical(x), Value::Tropical(y)) => Value::Tropical(*x.min(y)),
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (Value::Set(x), Value::Set(y)) => Value::Set(TokenSet(x.0 & y.0)),
            (Value::Chain(x), Value::Chain(y)) => {
                Value::Chain(x.iter().zip(y).map(|(p, q)| *p.min(q)).collect())
            }
            (Value::Nat(x), Value::Nat(y)) => Value::Nat(
                (*x).checked_add(*y)
                    .ok_or_else(|| SemiringError::Overflow(self.name.clone()))?,
            ),
            _ => unreachable!("operands checked against the carrier"),
        })
    }

    /// `a ⊗ b`.
    pub fn times(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Value::Tropical(x), Value::Tropical(y)) => Value::Tropical(match (x, y) {
                (Tropical::Finite(p), Tropical::Finite(q)) => Tropical::Finite(
                    p.checked_add(q)
                        .ok_or_else(|| SemiringError::Overflow(self.name.clone()))?,
                ),
                _ => Tropical::Infinity,
            }),
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (Value::Set(x), Value::Set(y)) => Value::Set(TokenSet(x.0 | y.0)),
            (Value::Chain(x), Value::Chain(y)) => {
                Value::Chain(x.iter().zip(y).map(|(p, q)| *p.max(q)).collect())
            }
            (Value::Nat(x), Value::Nat(y)) => Value::Nat(
                (*x).checked_mul(*y)
                    .ok_or_else(|| SemiringError::Overflow(self.name.clone()))?,
            ),
            _ => unreachable!("operands checked against the carrier"),
        })
    }

    /// `⊗` over a sequence; `one()` for the empty product.
    pub fn product<'a>(
        &self,
        values: impl IntoIterator<Item = &'a Value>,
    ) -> Result<Value, SemiringError> {
        values
            .into_iter()
            .try_fold(self.one(), |acc, v| self.times(&acc, v))
    }

    /// `⊕` over a sequence; `zero()` for the empty sum.
    pub fn sum<'a>(
        &self,
        values: impl IntoIterator<Item = &'a Value>,
    ) -> Result<Value, SemiringError> {
        values
            .into_iter()
            .try_fold(self.zero(), |acc, v| self.plus(&acc, v))
    }

    /// Natural order: `a ≤ b` iff `a ⊕ b = a`.
    pub fn natural_leq(&self, a: &Value, b: &Value) -> Result<bool, SemiringError> {
        if !self.has(Properties::IDEMPOTENT) {
            return Err(SemiringError::UnsupportedOrder(self.name.clone()));
        }
        Ok(self.plus(a, b)? == *a)
    }

    /// A key whose `Ord` agrees with the natural order. Only available for
    /// carriers that really are chains.
    pub fn priority_key(&self, v: &Value) -> Result<PriorityKey, SemiringError> {
        let unsupported = || SemiringError::Unsupported {
            semiring: self.header(),
            what: "a total order",
        };
        if !self.has(Properties::TOTALLY_ORDERED) {
            return Err(unsupported());
        }
        self.check(v)?;
        match (&self.kind, v) {
            (SemiringKind::Tropical, Value::Tropical(t)) => Ok(PriorityKey::Tropical(*t)),
            (SemiringKind::Boolean, Value::Bool(b)) => Ok(PriorityKey::Rank(u64::from(!*b))),
            (SemiringKind::SetLattice { universe }, Value::Set(s)) if universe.len() == 1 => {
                Ok(PriorityKey::Rank(s.0))
            }
            (SemiringKind::ChainProduct { lengths }, Value::Chain(c)) if lengths.len() == 1 => {
                Ok(PriorityKey::Rank(u64::from(c[0])))
            }
            _ => Err(unsupported()),
        }
    }

    /// The chain semiring of decomposition dimension `i`.
    pub fn dimension_spec(&self, i: usize) -> Result<SemiringSpec, SemiringError> {
        let dims = self.require_lattice()?;
        if i >= dims {
            return Err(SemiringError::Arity {
                expected: dims,
                found: i + 1,
            });
        }
        match &self.kind {
            SemiringKind::ChainProduct { lengths } => Self::chain(lengths[i]),
            _ => Self::chain(2),
        }
    }

    fn require_lattice(&self) -> Result<usize, SemiringError> {
        self.lattice_dims()
            .ok_or_else(|| SemiringError::Unsupported {
                semiring: self.header(),
                what: "lattice decomposition",
            })
    }

    /// Coordinates of `v` along each join-irreducible chain. Coordinate `i`
    /// is a value of [`dimension_spec(i)`](Self::dimension_spec).
    pub fn decompose(&self, v: &Value) -> Result<Vec<Value>, SemiringError> {
        self.require_lattice()?;
        self.check(v)?;
        Ok(match v {
            Value::Bool(b) => vec![Value::Chain(vec![u32::from(!*b)])],
            Value::Set(s) => {
                let n = self.lattice_dims().unwrap_or(0);
                (0..n)
                    .map(|i| Value::Chain(vec![u32::from(s.contains(i))]))
                    .collect()
            }
            Value::Chain(c) => c.iter().map(|p| Value::Chain(vec![*p])).collect(),
            _ => unreachable!("lattice carriers only"),
        })
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn recompose(&self, coords: &[Value]) -> Result<Value, SemiringError> {
        let dims = self.require_lattice()?;
        if coords.len() != dims {
            return Err(SemiringError::Arity {
                expected: dims,
                found: coords.len(),
            });
        }
        let mut positions = Vec::with_capacity(dims);
        for (i, c) in coords.iter().enumerate() {
            self.dimension_spec(i)?.check(c)?;
            match c {
                Value::Chain(p) => positions.push(p[0]),
                _ => unreachable!("checked against the chain carrier"),
            }
        }
        Ok(match &self.kind {
            SemiringKind::Boolean => Value::Bool(positions[0] == 0),
            SemiringKind::SetLattice { .. } => Value::Set(
                positions
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p == 1)
                    .fold(TokenSet::default(), |s, (i, _)| s.with(i)),
            ),
            SemiringKind::ChainProduct { .. } => Value::Chain(positions),
            _ => unreachable!("lattice carriers only"),
        })
    }

    /// Parses a value literal in this semiring's grammar.
    pub fn parse_value(&self, literal: &str) -> Result<Value, SemiringError> {
        let text = literal.trim();
        let fail = |reason: &str| SemiringError::Literal {
            semiring: self.name.clone(),
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        match &self.kind {
            SemiringKind::Tropical => parse_tropical(text)
                .map(Value::Tropical)
                .map_err(|r| fail(&r)),
            SemiringKind::Boolean => match text {
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => Err(fail("expected `true` or `false`")),
            },
            SemiringKind::Counting => text
                .parse::<u64>()
                .map(Value::Nat)
                .map_err(|_| fail("expected a non-negative integer")),
            SemiringKind::SetLattice { universe } => {
                let inner = text
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| fail("expected `{...}`"))?;
                let inner = inner.trim();
                let mut set = TokenSet::default();
                if inner.is_empty() {
                    return Ok(Value::Set(set));
                }
                for tok in inner.split(',').map(str::trim) {
                    if tok.is_empty() {
                        return Err(fail("empty element in set"));
                    }
                    let idx = universe
                        .iter()
                        .position(|u| u == tok)
                        .ok_or_else(|| fail(&format!("`{tok}` is not in the universe")))?;
                    set = set.with(idx);
                }
                Ok(Value::Set(set))
            }
            SemiringKind::ChainProduct { lengths } => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| fail("expected `(...)`"))?;
                let coords = inner
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<u32>()
                            .map_err(|_| fail("bad chain position"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != lengths.len() {
                    return Err(fail(&format!("expected {} coordinates", lengths.len())));
                }
                if coords.iter().zip(lengths).any(|(p, l)| p >= l) {
                    return Err(fail("position outside its chain"));
                }
                Ok(Value::Chain(coords))
            }
        }
    }

    /// Formats `v` in the literal grammar accepted by
    /// [`parse_value`](Self::parse_value).
    pub fn format_value(&self, v: &Value) -> String {
        match (v, &self.kind) {
            (Value::Tropical(t), _) => t.to_string(),
            (Value::Bool(b), _) => b.to_string(),
            (Value::Nat(n), _) => n.to_string(),
            (Value::Set(s), SemiringKind::SetLattice { universe }) => {
                let toks: Vec<&str> = universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| s.contains(*i))
                    .map(|(_, t)| t.as_str())
                    .collect();
                format!("{{{}}}", toks.join(","))
            }
            (Value::Chain(c), _) => {
                let p: Vec<String> = c.iter().map(u32::to_string).collect();
                format!("({})", p.join(","))
            }
            (other, _) => format!("{other:?}"),
        }
    }

    /// Draws a random element from the per-semiring sampling distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Value {
        match &self.kind {
            SemiringKind::Tropical => {
                if rng.random_ratio(1, 20) {
                    Value::infinity()
                } else {
                    Value::tropical(rng.random_range(0..=100))
                }
            }
            SemiringKind::Boolean => Value::Bool(rng.random()),
            SemiringKind::SetLattice { universe } => Value::Set(TokenSet(
                rng.random::<u64>() & TokenSet::full(universe.len()).0,
            )),
            SemiringKind::ChainProduct { lengths } => {
                Value::Chain(lengths.iter().map(|l| rng.random_range(0..*l)).collect())
            }
            SemiringKind::Counting => Value::Nat(rng.random_range(0..=20)),
        }
    }

    /// Every element of a finite carrier, or `None` for infinite ones.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match &self.kind {
            SemiringKind::Boolean => Some(vec![Value::Bool(true), Value::Bool(false)]),
            SemiringKind::SetLattice { universe } if universe.len() <= 16 => Some(
                (0..1u64 << universe.len())
                    .map(|m| Value::Set(TokenSet(m)))
                    .collect(),
            ),
            SemiringKind::ChainProduct { lengths } => {
                let mut out = vec![Vec::new()];
                for &l in lengths {
                    out = out
                        .into_iter()
                        .flat_map(|prefix: Vec<u32>| {
                            (0..l).map(move |p| {
                                let mut next = prefix.clone();
                                next.push(p);
                                next
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(Value::Chain).collect())
            }
            _ => None,
        }
    }
}

impl fmt::Display for SemiringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.header())
    }
}

/// Ordering key for priority queues over totally ordered semirings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PriorityKey {
    Tropical(Tropical),
    Rank(u64),
}

fn lattice_properties() -> Properties {
    Properties::COMMUTATIVE
        | Properties::IDEMPOTENT
        | Properties::ZERO_CLOSED
        | Properties::MULT_IDEMPOTENT
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !matches!(c, ',' | '{' | '}' | '(' | ')'))
}

fn parse_tropical(text: &str) -> Result<Tropical, String> {
    if text == "inf" {
        return Ok(Tropical::Infinity);
    }
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if let Some((n, d)) = text.split_once('/') {
        if !digits(n) || !digits(d) {
            return Err("expected `p/q` with decimal integers".into());
        }
        let n: u64 = n
            .parse()
            .map_err(|_| "numerator out of range".to_string())?;
        let d: u64 = d
            .parse()
            .map_err(|_| "denominator out of range".to_string())?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Tropical::Finite(Ratio::new(n, d)));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if !digits(int) || !digits(frac) || frac.len() > 18 {
            return Err("malformed decimal".into());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let whole: u64 = int.parse().map_err(|_| "value out of range".to_string())?;
        let part: u64 = frac.parse().map_err(|_| "value out of range".to_string())?;
        let numer = whole
            .checked_mul(scale)
            .and_then(|w| w.checked_add(part))
            .ok_or_else(|| "value out of range".to_string())?;
        return Ok(Tropical::Finite(Ratio::new(numer, scale)));
    }
    if !digits(text) {
        return Err("expected a non-negative integer, rational, or `inf`".into());
    }
    text.parse::<u64>()
        .map(Tropical::int)
        .map_err(|_| "value out of range".into())
}

impl FromStr for SemiringSpec {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_header(s)
    }
}

/// Compares two values of a totally ordered semiring along the natural order.
pub fn cmp_natural(spec: &SemiringSpec, a: &Value, b: &Value) -> Result<Ordering, SemiringError> {
    Ok(spec.priority_key(a)?.cmp(&spec.priority_key(b)?))
}
