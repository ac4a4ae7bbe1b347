use crate::frontend::{Program, Rule, Term};
use crate::semiring::{SemiringError, Value};

use super::store::{AtomId, ConstId, FactStore, Mask, RelId};
use super::GroundingError;

#[derive(Clone, Copy, Debug)]
enum Slot {
    Var(usize),
    Const(ConstId),
}

#[derive(Clone, Debug)]
struct CompiledAtom {
    rel: RelId,
    slots: Vec<Slot>,
}

/// One body position of a join plan.
#[derive(Clone, Debug)]
struct Step {
    pos: usize,
    mask: Mask,
    /// Slots of the bound positions, in position order; they form the probe key.
    key: Vec<Slot>,
    /// Free positions: `(column, variable, first occurrence in this atom)`.
    free: Vec<(usize, usize, bool)>,
}

#[derive(Clone, Debug)]
struct Plan {
    /// Body occurrence unified with the trigger, if any.
    trigger: Option<usize>,
    steps: Vec<Step>,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledRule {
    head: CompiledAtom,
    body: Vec<CompiledAtom>,
    num_vars: usize,
    full: Plan,
    /// Indexed by body occurrence.
    triggered: Vec<Plan>,
}

impl CompiledRule {
    pub(crate) fn body_relations(&self) -> impl Iterator<Item = RelId> + '_ {
        self.body.iter().map(|a| a.rel)
    }

    pub(crate) fn head_relation(&self) -> RelId {
        self.head.rel
    }
}

/// A rule instantiation: ground head, ground body, and `⊗` of body values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundInstance {
    pub rule: usize,
    pub head_relation: RelId,
    pub head_args: Vec<ConstId>,
    pub body: Vec<AtomId>,
    pub value: Value,
}

pub(crate) fn compile(
    program: &Program,
    rule: &Rule,
    store: &mut FactStore,
) -> Result<CompiledRule, GroundingError> {
    let mut vars: Vec<String> = Vec::new();
    let mut atom = |a: &crate::frontend::Atom,
                    store: &mut FactStore|
     -> Result<CompiledAtom, GroundingError> {
        let rel = store
            .relation_id(&a.relation)
            .ok_or_else(|| GroundingError::UnknownRelation(a.relation.clone()))?;
        if a.terms.len() > 64 {
            return Err(GroundingError::TooWide(a.relation.clone()));
        }
        let decl = program
            .decl(&a.relation)
            .expect("relation ids come from declarations");
        if decl.arity() != a.terms.len() {
            return Err(GroundingError::Arity(a.relation.clone()));
        }
        let slots = a
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => Slot::Const(store.intern_const(c)),
                Term::Var(v) => Slot::Var(match vars.iter().position(|x| x == v) {
                    Some(i) => i,
                    None => {
                        vars.push(v.clone());
                        vars.len() - 1
                    }
                }),
            })
            .collect();
        Ok(CompiledAtom { rel, slots })
    };
    let body = rule
        .body
        .iter()
        .map(|a| atom(a, store))
        .collect::<Result<Vec<_>, _>>()?;
    let head = atom(&rule.head, store)?;
    let num_vars = vars.len();
    if head
        .slots
        .iter()
        .any(|s| matches!(s, Slot::Var(v) if !body.iter().any(|b| b.slots.iter().any(|t| matches!(t, Slot::Var(w) if w == v)))))
    {
        return Err(GroundingError::RangeRestriction(rule.to_string()));
    }

    let full = plan(&body, None, num_vars);
    let triggered = (0..body.len())
        .map(|m| plan(&body, Some(m), num_vars))
        .collect();
    let compiled = CompiledRule {
        head,
        body,
        num_vars,
        full,
        triggered,
    };
    for p in std::iter::once(&compiled.full).chain(&compiled.triggered) {
        for s in &p.steps {
            store.register_index(compiled.body[s.pos].rel, s.mask);
        }
    }
    Ok(compiled)
}

fn plan(body: &[CompiledAtom], trigger: Option<usize>, num_vars: usize) -> Plan {
    let mut bound = vec![false; num_vars];
    if let Some(m) = trigger {
        for s in &body[m].slots {
            if let Slot::Var(v) = s {
                bound[*v] = true;
            }
        }
    }
    let mut steps = Vec::new();
    for (pos, atom) in body.iter().enumerate() {
        if Some(pos) == trigger {
            continue;
        }
        let mut mask = 0;
        let mut key = Vec::new();
        let mut free = Vec::new();
        let mut seen_here: Vec<usize> = Vec::new();
        for (col, slot) in atom.slots.iter().enumerate() {
            match *slot {
                Slot::Const(_) => {
                    mask |= 1 << col;
                    key.push(*slot);
                }
                Slot::Var(v) if bound[v] => {
                    mask |= 1 << col;
                    key.push(*slot);
                }
                Slot::Var(v) => {
                    let first = !seen_here.contains(&v);
                    seen_here.push(v);
                    free.push((col, v, first));
                }
            }
        }
        for v in seen_here {
            bound[v] = true;
        }
        steps.push(Step {
            pos,
            mask,
            key,
            free,
        });
    }
    Plan { trigger, steps }
}

struct Search<'a> {
    store: &'a FactStore,
    rule: &'a CompiledRule,
    rule_index: usize,
    plan: &'a Plan,
    trigger: Option<AtomId>,
    binding: Vec<ConstId>,
    body: Vec<AtomId>,
    out: &'a mut Vec<GroundInstance>,
}

impl Search<'_> {
    fn run(&mut self, step: usize) -> Result<(), SemiringError> {
        let Some(s) = self.plan.steps.get(step) else {
            return self.emit();
        };
        let rel = self.rule.body[s.pos].rel;
        let key: Vec<ConstId> = s
            .key
            .iter()
            .map(|slot| match *slot {
                Slot::Const(c) => c,
                Slot::Var(v) => self.binding[v],
            })
            .collect();
        let m = self.plan.trigger.unwrap_or(usize::MAX);
        let store = self.store;
        let candidates = store.probe(rel, s.mask, &key);
        // Occurrences before the trigger may also use the trigger itself,
        // occurrences after it may not.
        let extra = match self.trigger {
            Some(t) if s.pos < m && !store.is_settled(t) && store.relation_of(t) == rel => {
                let args = store.args(t);
                let matches = (0..args.len())
                    .filter(|c| s.mask & (1 << c) != 0)
                    .map(|c| args[c])
                    .eq(key.iter().copied());
                matches.then_some(t)
            }
            _ => None,
        };
        for &cand in candidates.iter().chain(extra.iter()) {
            if s.pos > m && Some(cand) == self.trigger {
                continue;
            }
            let args = store.args(cand);
            let mut ok = true;
            for &(col, v, first) in &s.free {
                if first {
                    self.binding[v] = args[col];
                } else if self.binding[v] != args[col] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            self.body[s.pos] = cand;
            self.run(step + 1)?;
        }
        Ok(())
    }

    fn emit(&mut self) -> Result<(), SemiringError> {
        let spec = self.store.spec();
        let value = spec.product(self.body.iter().map(|a| self.store.value(*a)))?;
        let head_args = self
            .rule
            .head
            .slots
            .iter()
            .map(|slot| match *slot {
                Slot::Const(c) => c,
                Slot::Var(v) => self.binding[v],
            })
            .collect();
        self.out.push(GroundInstance {
            rule: self.rule_index,
            head_relation: self.rule.head.rel,
            head_args,
            body: self.body.clone(),
            value,
        });
        Ok(())
    }
}

/// Binds the trigger's arguments against occurrence `m`; `None` if they do
/// not unify.
fn unify_trigger(
    atom: &CompiledAtom,
    args: &[ConstId],
    binding: &mut [ConstId],
    num_vars: usize,
) -> Option<()> {
    let mut set = vec![false; num_vars];
    for (slot, &c) in atom.slots.iter().zip(args) {
        match *slot {
            Slot::Const(k) if k != c => return None,
            Slot::Const(_) => {}
            Slot::Var(v) if set[v] && binding[v] != c => return None,
            Slot::Var(v) => {
                binding[v] = c;
                set[v] = true;
            }
        }
    }
    Some(())
}

/// Every instantiation of `rule` whose body atoms are all settled.
pub(crate) fn instantiate_all(
    store: &FactStore,
    rule: &CompiledRule,
    rule_index: usize,
    out: &mut Vec<GroundInstance>,
) -> Result<(), SemiringError> {
    let mut search = Search {
        store,
        rule,
        rule_index,
        plan: &rule.full,
        trigger: None,
        binding: vec![0; rule.num_vars],
        body: vec![AtomId(0); rule.body.len()],
        out,
    };
    search.run(0)
}

/// Instantiations that use `trigger` at body occurrence `m`, with earlier
/// occurrences drawn from settled atoms plus the trigger and later ones from
/// settled atoms other than the trigger.
pub(crate) fn instantiate_at(
    store: &FactStore,
    rule: &CompiledRule,
    rule_index: usize,
    trigger: AtomId,
    m: usize,
    out: &mut Vec<GroundInstance>,
) -> Result<(), SemiringError> {
    let atom = &rule.body[m];
    if atom.rel != store.relation_of(trigger) {
        return Ok(());
    }
    let mut binding = vec![0; rule.num_vars];
    if unify_trigger(atom, store.args(trigger), &mut binding, rule.num_vars).is_none() {
        return Ok(());
    }
    let mut body = vec![AtomId(0); rule.body.len()];
    body[m] = trigger;
    let mut search = Search {
        store,
        rule,
        rule_index,
        plan: &rule.triggered[m],
        trigger: Some(trigger),
        binding,
        body,
        out,
    };
    search.run(0)
}
