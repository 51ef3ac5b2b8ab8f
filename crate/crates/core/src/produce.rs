use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::accept::RepeatConfig;
use crate::alphabet::MonomerAlphabet;
use crate::rule::{Rule, RuleSet};
use crate::tree::{Molecule, NodeId, Tree};

pub const DEFAULT_MAX_MOLECULES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    /// Molecules taller than this are pruned (and counted) instead of stored.
    pub height_bound: usize,
    pub repeats: Option<RepeatConfig>,
    /// Honor fast/slow dominance; when off, rule speeds are ignored.
    pub fast_slow: bool,
    pub max_molecules: usize,
}

impl ClosureConfig {
    pub fn new(height_bound: usize) -> Self {
        ClosureConfig {
            height_bound,
            repeats: None,
            fast_slow: false,
            max_molecules: DEFAULT_MAX_MOLECULES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosureError {
    #[error("closure exceeded {0} molecules")]
    BudgetExceeded(usize),
}

/// The site of one rule application: the new piece hangs in `slot` of `node`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Site {
    pub node: NodeId,
    pub slot: usize,
}

/// `r` matches `m` with its expand root landing in `slot` of `v`, the slot is free and
/// every hard-end slot of the matched region is empty.
pub fn applicable(m: &Tree, v: NodeId, slot: usize, r: &Rule) -> bool {
    if slot != r.expand_slot() || slot > m.arity(v) || m.child(v, slot).is_some() {
        return false;
    }
    let t = r.tree();
    let parent = t.parent(r.expand_root()).expect("expand root has a parent").0;
    if t.label(parent) != m.label(v) {
        return false;
    }
    match m.ancestor(v, r.expand_depth() - 1) {
        Some(a) => pattern_at(r, t.root(), m, a),
        None => false,
    }
}

fn pattern_at(r: &Rule, rv: NodeId, m: &Tree, v: NodeId) -> bool {
    let t = r.tree();
    if t.label(rv) != m.label(v) {
        return false;
    }
    for slot in 1..=t.arity(rv) {
        match t.child(rv, slot) {
            Some(c) if c == r.expand_root() => {}
            Some(c) => match m.child(v, slot) {
                Some(mc) if pattern_at(r, c, m, mc) => {}
                _ => return false,
            },
            None if r.is_hard_end(rv, slot) => {
                if m.child(v, slot).is_some() {
                    return false;
                }
            }
            None => {}
        }
    }
    true
}

/// Applies `r` at `slot` of `v`, returning the extended copy, or `None` when not applicable.
pub fn apply(
    alphabet: &MonomerAlphabet,
    m: &Molecule,
    v: NodeId,
    slot: usize,
    r: &Rule,
) -> Option<Molecule> {
    if !m.contains(v) || !applicable(m, v, slot, r) {
        return None;
    }
    let mut out = m.tree().clone();
    out.attach_copy(alphabet, v, slot, r.tree(), r.expand_root())
        .expect("slot checked free");
    Some(Molecule::new(out))
}

/// Every free site of `m` at which `r` applies.
pub fn sites<'a>(m: &'a Tree, r: &'a Rule) -> impl Iterator<Item = Site> + 'a {
    m.node_ids().filter_map(move |v| {
        let slot = r.expand_slot();
        applicable(m, v, slot, r).then_some(Site { node: v, slot })
    })
}

/// How a closure member was first reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub from: usize,
    pub rule: usize,
    pub stage: u32,
    pub site: Site,
}

#[derive(Clone, Debug)]
pub struct Closure {
    molecules: Vec<Molecule>,
    index: HashMap<Molecule, usize>,
    witness: Vec<Option<Step>>,
    pruned: usize,
}

impl Closure {
    pub fn molecules(&self) -> &[Molecule] {
        &self.molecules
    }

    pub fn len(&self) -> usize {
        self.molecules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.molecules.is_empty()
    }

    pub fn contains(&self, m: &Molecule) -> bool {
        self.index.contains_key(m)
    }

    pub fn position(&self, m: &Molecule) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Applications that produced a molecule over the height bound.
    pub fn pruned(&self) -> usize {
        self.pruned
    }

    /// First derivation of molecule `i`, seed first.
    pub fn derivation(&self, i: usize) -> Vec<(usize, Option<&Step>)> {
        let mut chain = vec![(i, self.witness[i].as_ref())];
        let mut cur = i;
        while let Some(step) = &self.witness[cur] {
            cur = step.from;
            chain.push((cur, self.witness[cur].as_ref()));
        }
        chain.reverse();
        chain
    }

    /// Molecules sorted by node count, then by canonical text.
    pub fn sorted_texts(&self, alphabet: &MonomerAlphabet) -> Vec<String> {
        let mut v: Vec<(usize, String)> = self
            .molecules
            .iter()
            .map(|m| (m.len(), crate::text::molecule_to_string(alphabet, m)))
            .collect();
        v.sort();
        v.into_iter().map(|(_, s)| s).collect()
    }

    fn insert(
        &mut self,
        m: Molecule,
        step: Option<Step>,
        cap: usize,
    ) -> Result<Option<usize>, ClosureError> {
        if self.index.contains_key(&m) {
            return Ok(None);
        }
        if self.molecules.len() >= cap {
            return Err(ClosureError::BudgetExceeded(cap));
        }
        let i = self.molecules.len();
        self.index.insert(m.clone(), i);
        self.molecules.push(m);
        self.witness.push(step);
        Ok(Some(i))
    }
}

/// Producible molecules from `seeds`: compartments run in ascending order, each stage
/// saturating everything produced so far with its own rules; the result is the union
/// of all stages. Within a stage, smaller molecules are expanded first.
pub fn closure(
    alphabet: &MonomerAlphabet,
    seeds: &[Molecule],
    rs: &RuleSet,
    cfg: &ClosureConfig,
) -> Result<Closure, ClosureError> {
    let mut cl = Closure {
        molecules: Vec::new(),
        index: HashMap::new(),
        witness: Vec::new(),
        pruned: 0,
    };
    for s in seeds {
        if s.height() <= cfg.height_bound {
            cl.insert(s.clone(), None, cfg.max_molecules)?;
        } else {
            cl.pruned += 1;
        }
    }
    for stage in 1..=rs.compartment_count() {
        let rules: Vec<(usize, &Rule)> = rs
            .rules()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.compartment() == stage)
            .collect();
        if rules.is_empty() {
            continue;
        }
        let mut queue: BinaryHeap<Reverse<(usize, usize)>> =
            (0..cl.len()).map(|i| Reverse((cl.molecules[i].len(), i))).collect();
        while let Some(Reverse((_, i))) = queue.pop() {
            let m = cl.molecules[i].clone();
            let active: Vec<(usize, &Rule)> = if cfg.fast_slow {
                let fast: Vec<_> = rules.iter().copied().filter(|(_, r)| r.is_fast()).collect();
                if fast.iter().any(|(_, r)| sites(&m, r).next().is_some()) {
                    fast
                } else {
                    rules.clone()
                }
            } else {
                rules.clone()
            };
            for &(ri, r) in &active {
                for site in sites(&m, r).collect::<Vec<_>>() {
                    let next = apply(alphabet, &m, site.node, site.slot, r)
                        .expect("site is applicable");
                    if next.height() > cfg.height_bound {
                        cl.pruned += 1;
                        continue;
                    }
                    let step = Step {
                        from: i,
                        rule: ri,
                        stage,
                        site,
                    };
                    if let Some(j) = cl.insert(next, Some(step), cfg.max_molecules)? {
                        queue.push(Reverse((cl.molecules[j].len(), j)));
                    }
                }
            }
        }
    }
    Ok(cl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_molecule, parse_rules};
    use crate::text::molecule_to_string;

    fn fig4() -> (MonomerAlphabet, Rule, Rule) {
        let f = parse_rules("sugar A 2; sugar B 0\nrule A(*A, B)\nrule A(*A, !)").unwrap();
        (f.alphabet, f.rules[0].clone(), f.rules[1].clone())
    }

    #[test]
    fn applies_at_the_matching_node_only() {
        let (a, r, _) = fig4();
        let m = parse_molecule(&a, "A(_, A(_, B))").unwrap();
        let mid = m.child(m.root(), 2).unwrap();
        let out = apply(&a, &m, mid, 1, &r).unwrap();
        assert_eq!(molecule_to_string(&a, &out), "A(_, A(A, B))");
        assert_eq!(out.len(), m.len() + 1);
        assert!(apply(&a, &m, m.root(), 1, &r).is_none());
        assert!(apply(&a, &m, mid, 2, &r).is_none());
    }

    #[test]
    fn hard_end_blocks_occupied_slot() {
        let (a, _, he) = fig4();
        let m = parse_molecule(&a, "A(_, A(_, B))").unwrap();
        let mid = m.child(m.root(), 2).unwrap();
        assert!(apply(&a, &m, mid, 1, &he).is_none());
        assert!(apply(&a, &m, m.root(), 1, &he).is_none());
        let free = parse_molecule(&a, "A(_, _)").unwrap();
        assert!(apply(&a, &free, free.root(), 1, &he).is_some());
    }

    #[test]
    fn empty_rules_leave_seeds() {
        let (a, _, _) = fig4();
        let seeds: Vec<_> = a.ids().map(|s| Molecule::single(&a, s)).collect();
        let cl = closure(&a, &seeds, &RuleSet::empty(), &ClosureConfig::new(3)).unwrap();
        assert_eq!(cl.sorted_texts(&a), vec!["A", "B"]);
    }

    #[test]
    fn runaway_rules_hit_the_cap() {
        let f = parse_rules("sugar A 2\nrule A(*A, _)\nrule A(_, *A)").unwrap();
        let mut cfg = ClosureConfig::new(6);
        cfg.max_molecules = 50;
        let seeds = vec![Molecule::single(&f.alphabet, crate::alphabet::SugarId(0))];
        let rs = RuleSet::from_rules(f.rules);
        assert_eq!(
            closure(&f.alphabet, &seeds, &rs, &cfg).unwrap_err(),
            ClosureError::BudgetExceeded(50)
        );
        cfg.height_bound = 2;
        cfg.max_molecules = 1000;
        let cl = closure(&f.alphabet, &seeds, &rs, &cfg).unwrap();
        assert!(cl.pruned() > 0);
        assert!(cl.molecules().iter().all(|m| m.height() <= 2));
    }
}
