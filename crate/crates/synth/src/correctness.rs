//! Well-formedness of rule templates, molecule templates and the ordering of templates.

use glycan_core::{Dataset, MonomerAlphabet, NodeId, RepeatConfig, Situation, Tree};
use glycan_smt::{and, eq, exactly_one, implies, ite, lex_le, neq, not, or, or2, tt, Term};

use crate::template::{kappa, sugar_code, MolView, RuleView};

fn is(k: &Term, s: Situation) -> Term {
    eq(k.clone(), kappa(s))
}

/// `label` is not a sugar whose arity leaves slot `slot` undefined.
fn has_slot(alphabet: &MonomerAlphabet, label: &Term, slot: usize) -> Term {
    and(alphabet
        .ids()
        .filter(|&s| alphabet.arity(s) < slot)
        .map(|s| neq(label.clone(), Term::int(sugar_code(s))))
        .collect::<Vec<_>>())
}

/// Every model of the result decodes to a well-formed rule per template.
pub fn rule_template_correctness(
    alphabet: &MonomerAlphabet,
    templates: &[RuleView],
    depth: usize,
) -> Term {
    let mut parts = Vec::new();
    for t in templates {
        parts.push(is(&t.nodes[0].kappa, Situation::MatchAns));
        for (r, node) in t.nodes.iter().enumerate() {
            let k = &node.kappa;
            parts.push(eq(
                is(k, Situation::Absent),
                eq(node.nu.clone(), Term::int(0)),
            ));
            if node.depth + 1 >= depth {
                parts.push(not(is(k, Situation::MatchAns)));
            }
            if r == 0 {
                parts.push(not(node.hard_end.clone()));
            }
            let mut ans_children = Vec::new();
            for (i, &c) in node.children.iter().enumerate() {
                let slot = i + 1;
                let ck = &t.nodes[c].kappa;
                let present = not(is(ck, Situation::Absent));
                parts.push(implies(present.clone(), has_slot(alphabet, &node.nu, slot)));
                parts.push(implies(present, not(is(k, Situation::Absent))));
                parts.push(implies(
                    is(k, Situation::Expand),
                    or2(is(ck, Situation::Expand), is(ck, Situation::Absent)),
                ));
                parts.push(implies(
                    is(k, Situation::Match),
                    or2(is(ck, Situation::Match), is(ck, Situation::Absent)),
                ));
                ans_children.push(or2(is(ck, Situation::MatchAns), is(ck, Situation::Expand)));
                let he = t.nodes[c].hard_end.clone();
                if !he.is_false() {
                    parts.push(implies(
                        he.clone(),
                        and([
                            is(ck, Situation::Absent),
                            or2(is(k, Situation::Match), is(k, Situation::MatchAns)),
                            has_slot(alphabet, &node.nu, slot),
                        ]),
                    ));
                }
            }
            parts.push(implies(
                is(k, Situation::MatchAns),
                exactly_one(&ans_children),
            ));
        }
    }
    and(parts)
}

/// Adjacent templates are ordered lexicographically, removing permutations of a rule set.
pub fn symmetry_break(templates: &[RuleView]) -> Term {
    let key = |t: &RuleView| -> Vec<Term> {
        let mut v: Vec<Term> = t
            .nodes
            .iter()
            .flat_map(|n| [n.kappa.clone(), n.nu.clone()])
            .collect();
        v.push(t.compart.clone());
        v.push(ite(t.fast.clone(), Term::int(1), Term::int(0)));
        v
    };
    and(templates
        .windows(2)
        .map(|w| lex_le(&key(&w[0]), &key(&w[1])))
        .collect::<Vec<_>>())
}

/// The molecule template denotes a well-formed molecule grown from a seed label that is
/// not an acceptable intermediate of any observed molecule.
pub fn molecule_template_correctness(
    mol: &MolView,
    data: &Dataset,
    repeats: Option<RepeatConfig>,
) -> Term {
    let alphabet = data.alphabet();
    let mut parts = vec![or(data
        .root_labels()
        .into_iter()
        .map(|s| eq(mol.nodes[0].label.clone(), Term::int(sugar_code(s))))
        .collect::<Vec<_>>())];
    for (c, node) in mol.nodes.iter().enumerate().skip(1) {
        let (p, slot) = node.parent.expect("non-root");
        parts.push(implies(
            mol.present(c),
            and([mol.present(p), has_slot(alphabet, &mol.nodes[p].label, slot)]),
        ));
    }
    let acc = Acceptance {
        mol,
        repeats: repeats.filter(|r| r.d0 > 0 && r.r0 > 0),
    };
    for o in data.molecules() {
        parts.push(not(acc.accepted(0, o, o.root())));
    }
    and(parts)
}

struct Acceptance<'a> {
    mol: &'a MolView,
    repeats: Option<RepeatConfig>,
}

impl Acceptance<'_> {
    fn label(&self, u: Option<usize>) -> Term {
        u.map_or_else(|| Term::int(0), |u| self.mol.nodes[u].label.clone())
    }

    fn child(&self, u: Option<usize>, s: usize) -> Option<usize> {
        u.and_then(|u| self.mol.child(u, s))
    }

    /// Children of a present node `u` are handled by `f` when the observed node has
    /// the slot filled, and must be absent otherwise.
    fn children_within(
        &self,
        u: usize,
        o: &Tree,
        ov: NodeId,
        f: &dyn Fn(usize, NodeId) -> Term,
    ) -> Vec<Term> {
        (1..=self.mol.width)
            .filter_map(|s| {
                let c = self.mol.child(u, s)?;
                Some(match o.child(ov, s) {
                    None => not(self.mol.present(c)),
                    Some(oc) => implies(self.mol.present(c), f(c, oc)),
                })
            })
            .collect()
    }

    /// Present node `u` is accepted against observed node `ov`.
    fn accepted(&self, u: usize, o: &Tree, ov: NodeId) -> Term {
        let mut plain = vec![eq(
            self.mol.nodes[u].label.clone(),
            Term::int(sugar_code(o.label(ov))),
        )];
        plain.extend(self.children_within(u, o, ov, &|c, oc| self.accepted(c, o, oc)));
        match self.repeats {
            Some(rc) => or2(and(plain), self.repeated(u, o, ov, rc)),
            None => and(plain),
        }
    }

    fn prefix(&self, u: usize, o: &Tree, ov: NodeId) -> Term {
        let mut parts = vec![eq(
            self.mol.nodes[u].label.clone(),
            Term::int(sugar_code(o.label(ov))),
        )];
        parts.extend(self.children_within(u, o, ov, &|c, oc| self.prefix(c, o, oc)));
        and(parts)
    }

    fn repeated(&self, u: usize, o: &Tree, ov: NodeId, rc: RepeatConfig) -> Term {
        let mut ways = Vec::new();
        let mut paths: Vec<Vec<usize>> = (1..=self.mol.width).map(|s| vec![s]).collect();
        while let Some(path) = paths.pop() {
            if path.len() < rc.d0 {
                for s in 1..=self.mol.width {
                    let mut longer = path.clone();
                    longer.push(s);
                    paths.push(longer);
                }
            }
            let mut heads = vec![u];
            let mut units = Vec::new();
            for _ in 1..=rc.r0 {
                let prev = *heads.last().expect("nonempty");
                let Some(next) = self.mol.descend(prev, &path) else {
                    break;
                };
                units.push(self.mol.present(next));
                units.push(self.unit_eq(Some(prev), Some(next), &path));
                heads.push(next);
                let mut way = units.clone();
                way.push(self.prefix(next, o, ov));
                ways.push(and(way));
            }
        }
        or(ways)
    }

    fn unit_eq(&self, a: Option<usize>, b: Option<usize>, rest: &[usize]) -> Term {
        let mut parts = vec![eq(self.label(a), self.label(b))];
        for s in 1..=self.mol.width {
            let on_spine = rest.first() == Some(&s);
            if on_spine && rest.len() == 1 {
                continue;
            }
            let (x, y) = (self.child(a, s), self.child(b, s));
            if x.is_none() && y.is_none() {
                continue;
            }
            parts.push(if on_spine {
                self.unit_eq(x, y, &rest[1..])
            } else {
                self.exact_eq(x, y)
            });
        }
        and(parts)
    }

    fn exact_eq(&self, a: Option<usize>, b: Option<usize>) -> Term {
        if a.is_none() && b.is_none() {
            return tt();
        }
        let mut parts = vec![eq(self.label(a), self.label(b))];
        for s in 1..=self.mol.width {
            parts.push(self.exact_eq(self.child(a, s), self.child(b, s)));
        }
        and(parts)
    }
}
