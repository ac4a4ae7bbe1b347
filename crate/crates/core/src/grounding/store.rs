use std::collections::HashMap;

use crate::frontend::{Constant, Fact};
use crate::semiring::{SemiringSpec, Value};

pub type ConstId = u32;
pub type RelId = u32;

/// Dense id of an interned ground atom, assigned in first-seen order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bitmask over argument positions that are bound when an index is probed.
pub(crate) type Mask = u64;

#[derive(Default)]
struct Index {
    by_key: HashMap<Box<[ConstId]>, Vec<AtomId>>,
}

/// Interned ground atoms with their current value `ν` and membership in the
/// settled set `I`.
///
/// Only settled atoms are visible to joins. Each relation keeps one hash
/// index per bound-position pattern that some join plan probes; indexes are
/// maintained as atoms settle.
pub struct FactStore {
    spec: SemiringSpec,
    relation_names: Vec<String>,
    consts: Vec<Constant>,
    const_ids: HashMap<Constant, ConstId>,
    atoms: Vec<(RelId, Box<[ConstId]>)>,
    atom_ids: HashMap<(RelId, Box<[ConstId]>), AtomId>,
    values: Vec<Value>,
    settled: Vec<bool>,
    settled_by_rel: Vec<Vec<AtomId>>,
    indexes: Vec<Vec<(Mask, Index)>>,
}

impl FactStore {
    pub(crate) fn new(spec: SemiringSpec, relation_names: Vec<String>) -> Self {
        let n = relation_names.len();
        FactStore {
            spec,
            relation_names,
            consts: Vec::new(),
            const_ids: HashMap::new(),
            atoms: Vec::new(),
            atom_ids: HashMap::new(),
            values: Vec::new(),
            settled: Vec::new(),
            settled_by_rel: vec![Vec::new(); n],
            indexes: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    pub fn spec(&self) -> &SemiringSpec {
        &self.spec
    }

    pub(crate) fn register_index(&mut self, rel: RelId, mask: Mask) {
        if mask == 0 {
            return;
        }
        let slot = &mut self.indexes[rel as usize];
        if slot.iter().any(|(m, _)| *m == mask) {
            return;
        }
        let mut index = Index::default();
        for &id in &self.settled_by_rel[rel as usize] {
            let key = project(&self.atoms[id.index()].1, mask);
            index.by_key.entry(key).or_default().push(id);
        }
        slot.push((mask, index));
    }

    pub fn intern_const(&mut self, c: &Constant) -> ConstId {
        if let Some(&id) = self.const_ids.get(c) {
            return id;
        }
        let id = self.consts.len() as ConstId;
        self.consts.push(c.clone());
        self.const_ids.insert(c.clone(), id);
        id
    }

    pub fn constant(&self, id: ConstId) -> &Constant {
        &self.consts[id as usize]
    }

    pub(crate) fn intern_ground(&mut self, rel: RelId, args: &[ConstId]) -> AtomId {
        if let Some(&id) = self.atom_ids.get(&(rel, Box::from(args))) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32);
        let args: Box<[ConstId]> = args.into();
        self.atoms.push((rel, args.clone()));
        self.atom_ids.insert((rel, args), id);
        self.values.push(self.spec.zero());
        self.settled.push(false);
        id
    }

    pub(crate) fn lookup_ground(&self, rel: RelId, args: &[ConstId]) -> Option<AtomId> {
        self.atom_ids.get(&(rel, Box::from(args))).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<RelId> {
        self.relation_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as RelId)
    }

    pub fn relation_name(&self, rel: RelId) -> &str {
        &self.relation_names[rel as usize]
    }

    /// Interns `fact`; `None` if its relation is unknown.
    pub fn intern(&mut self, fact: &Fact) -> Option<AtomId> {
        let rel = self.relation_id(&fact.relation)?;
        let args: Vec<ConstId> = fact.args.iter().map(|c| self.intern_const(c)).collect();
        Some(self.intern_ground(rel, &args))
    }

    pub fn lookup(&self, fact: &Fact) -> Option<AtomId> {
        let rel = self.relation_id(&fact.relation)?;
        let args: Option<Vec<ConstId>> = fact
            .args
            .iter()
            .map(|c| self.const_ids.get(c).copied())
            .collect();
        self.lookup_ground(rel, &args?)
    }

    pub fn fact(&self, id: AtomId) -> Fact {
        let (rel, args) = &self.atoms[id.index()];
        Fact {
            relation: self.relation_names[*rel as usize].clone(),
            args: args
                .iter()
                .map(|c| self.consts[*c as usize].clone())
                .collect(),
        }
    }

    pub fn relation_of(&self, id: AtomId) -> RelId {
        self.atoms[id.index()].0
    }

    pub(crate) fn args(&self, id: AtomId) -> &[ConstId] {
        &self.atoms[id.index()].1
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_ids(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atoms.len() as u32).map(AtomId)
    }

    pub fn value(&self, id: AtomId) -> &Value {
        &self.values[id.index()]
    }

    pub(crate) fn set_value(&mut self, id: AtomId, v: Value) {
        self.values[id.index()] = v;
    }

    pub fn is_settled(&self, id: AtomId) -> bool {
        self.settled[id.index()]
    }

    /// Adds `id` to the settled set and to every index of its relation.
    pub(crate) fn settle(&mut self, id: AtomId) {
        if self.settled[id.index()] {
            return;
        }
        self.settled[id.index()] = true;
        let (rel, args) = &self.atoms[id.index()];
        let rel = *rel as usize;
        self.settled_by_rel[rel].push(id);
        for (mask, index) in &mut self.indexes[rel] {
            index
                .by_key
                .entry(project(args, *mask))
                .or_default()
                .push(id);
        }
    }

    pub fn settled_of(&self, rel: RelId) -> &[AtomId] {
        &self.settled_by_rel[rel as usize]
    }

    pub fn settled_count(&self) -> usize {
        self.settled_by_rel.iter().map(Vec::len).sum()
    }

    /// Settled atoms of `rel` whose `mask` positions equal `key`.
    pub(crate) fn probe(&self, rel: RelId, mask: Mask, key: &[ConstId]) -> &[AtomId] {
        if mask == 0 {
            return self.settled_of(rel);
        }
        let index = self.indexes[rel as usize]
            .iter()
            .find(|(m, _)| *m == mask)
            .map(|(_, i)| i)
            .expect("join plans register their indexes");
        index.by_key.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn project(args: &[ConstId], mask: Mask) -> Box<[ConstId]> {
    args.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, c)| *c)
        .collect()
}
