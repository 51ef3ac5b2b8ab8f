//! Full-tree views of rules and molecules whose fields are either solver variables
//! (templates) or constants (concrete values embedded in the same shape).

use glycan_core::{Molecule, MonomerAlphabet, NodeId, Rule, Situation, Tree};
use std::collections::HashMap;

use glycan_smt::{ff, neq, Term, Value, VarId, VarPool};

/// Sugar code used in formulas: 0 is "no node", monomer `s` is `s + 1`.
pub fn sugar_code(s: glycan_core::SugarId) -> i64 {
    s.index() as i64 + 1
}

pub fn kappa(s: Situation) -> Term {
    Term::int(s.code())
}

#[derive(Clone, Debug)]
pub struct RuleNode {
    pub depth: usize,
    pub parent: Option<(usize, usize)>,
    /// Children by slot (`children[i - 1]` for slot `i`); empty at the template depth.
    pub children: Vec<usize>,
    pub nu: Term,
    pub kappa: Term,
    pub hard_end: Term,
}

/// A rule template for rule depth `d` and width `w`: a full tree with `d` levels, so a
/// rule spans at most `d` levels and its expand root sits on one of levels `1..d`.
/// Nodes carry sugar and situation; compartment and speed belong to the whole rule.
#[derive(Clone, Debug)]
pub struct RuleView {
    pub index: usize,
    pub nodes: Vec<RuleNode>,
    pub compart: Term,
    pub fast: Term,
}

impl RuleView {
    pub fn root(&self) -> usize {
        0
    }

    pub fn child(&self, r: usize, slot: usize) -> Option<usize> {
        if slot == 0 {
            return None;
        }
        self.nodes[r].children.get(slot - 1).copied()
    }

    /// All solver variables of the view, in node order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        for n in &self.nodes {
            out.extend([&n.nu, &n.kappa, &n.hard_end].iter().filter_map(|t| t.as_var()));
        }
        out.extend([&self.compart, &self.fast].iter().filter_map(|t| t.as_var()));
        out
    }
}

/// Shape of the full tree: nodes in breadth-first order with their parent links.
fn full_tree(depth: usize, width: usize) -> Vec<(usize, Option<(usize, usize)>, Vec<usize>)> {
    let mut nodes: Vec<(usize, Option<(usize, usize)>, Vec<usize>)> = vec![(0, None, Vec::new())];
    let mut i = 0;
    while i < nodes.len() {
        let d = nodes[i].0;
        if d < depth {
            for slot in 1..=width {
                let id = nodes.len();
                nodes.push((d + 1, Some((i, slot)), Vec::new()));
                nodes[i].2.push(id);
            }
        }
        i += 1;
    }
    nodes
}

/// Number of nodes of a rule template with `depth` levels and the given width.
pub fn rule_template_size(depth: usize, width: usize) -> usize {
    (0..depth).map(|d| width.pow(d as u32)).sum()
}

/// Symbolic knobs shared by all templates of a job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemplateShape {
    pub depth: usize,
    pub width: usize,
    pub compartments: u32,
    pub hard_ends: bool,
    pub fast_slow: bool,
}

pub fn make_rule_templates(
    pool: &mut VarPool,
    alphabet: &MonomerAlphabet,
    shape: &TemplateShape,
    n: usize,
) -> Vec<RuleView> {
    let s = alphabet.len() as i64;
    (0..n)
        .map(|t| {
            let nodes = full_tree(shape.depth - 1, shape.width)
                .into_iter()
                .enumerate()
                .map(|(j, (depth, parent, children))| RuleNode {
                    depth,
                    parent,
                    children,
                    nu: pool.int_var(&format!("r{t}_n{j}_sugar"), 0, s),
                    kappa: pool.int_var(&format!("r{t}_n{j}_kappa"), 0, 3),
                    hard_end: if shape.hard_ends && parent.is_some() {
                        pool.bool_var(&format!("r{t}_n{j}_hardend"))
                    } else {
                        ff()
                    },
                })
                .collect();
            RuleView {
                index: t,
                nodes,
                compart: if shape.compartments > 1 {
                    pool.int_var(&format!("r{t}_compart"), 1, shape.compartments as i64)
                } else {
                    Term::int(1)
                },
                fast: if shape.fast_slow {
                    pool.bool_var(&format!("r{t}_fast"))
                } else {
                    ff()
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("rule of height {height} does not fit depth {depth}")]
    TooDeep { height: usize, depth: usize },
    #[error("expand root at depth {at} must be above depth {depth}")]
    ExpandTooDeep { at: usize, depth: usize },
    #[error("hard end below depth {depth}")]
    HardEndTooDeep { depth: usize },
    #[error("arity {arity} exceeds width {width}")]
    TooWide { arity: usize, width: usize },
    #[error("molecule of height {height} does not fit height {bound}")]
    TooTall { height: usize, bound: usize },
}

/// Embeds a concrete rule into the full shape as constants.
pub fn concrete_rule_view(
    rule: &Rule,
    index: usize,
    depth: usize,
    width: usize,
) -> Result<RuleView, ShapeError> {
    let t = rule.tree();
    if t.height() + 1 > depth {
        return Err(ShapeError::TooDeep {
            height: t.height(),
            depth,
        });
    }
    if rule.expand_depth() >= depth {
        return Err(ShapeError::ExpandTooDeep {
            at: rule.expand_depth(),
            depth,
        });
    }
    // A hard end occupies a child slot, so its node needs a level below it.
    if rule.hard_ends().iter().any(|&(v, _)| t.depth(v) + 2 > depth) {
        return Err(ShapeError::HardEndTooDeep { depth });
    }
    let shape = full_tree(depth - 1, width);
    let mut map: Vec<Option<NodeId>> = vec![None; shape.len()];
    map[0] = Some(t.root());
    for (j, (_, parent, _)) in shape.iter().enumerate().skip(1) {
        let (p, slot) = parent.expect("non-root");
        map[j] = map[p].and_then(|pv| t.child(pv, slot));
    }
    for v in t.node_ids() {
        if t.arity(v) > width && t.children(v).any(|(s, _)| s > width) {
            return Err(ShapeError::TooWide {
                arity: t.arity(v),
                width,
            });
        }
    }
    let nodes = shape
        .into_iter()
        .enumerate()
        .map(|(j, (depth, parent, children))| {
            let (nu, kappa_v) = match map[j] {
                Some(v) => (sugar_code(t.label(v)), rule.situation(v)),
                None => (0, Situation::Absent),
            };
            let hard_end = match parent {
                Some((p, slot)) => map[p].is_some_and(|pv| rule.is_hard_end(pv, slot)),
                None => false,
            };
            RuleNode {
                depth,
                parent,
                children,
                nu: Term::int(nu),
                kappa: kappa(kappa_v),
                hard_end: Term::bool(hard_end),
            }
        })
        .collect();
    Ok(RuleView {
        index,
        nodes,
        compart: Term::int(rule.compartment() as i64),
        fast: Term::bool(rule.is_fast()),
    })
}

#[derive(Clone, Debug)]
pub struct MolNode {
    pub depth: usize,
    pub parent: Option<(usize, usize)>,
    /// Children by slot; `None` when the slot is outside the view's structure.
    pub children: Vec<Option<usize>>,
    /// Sugar code, 0 when the node is absent.
    pub label: Term,
}

/// A molecule or molecule template: node 0 is the root.
#[derive(Clone, Debug)]
pub struct MolView {
    pub nodes: Vec<MolNode>,
    pub width: usize,
}

impl MolView {
    pub fn from_molecule(m: &Molecule, width: usize) -> Result<MolView, ShapeError> {
        let t: &Tree = m.tree();
        let mut order = vec![t.root()];
        let mut index = vec![usize::MAX; t.len()];
        index[t.root().index()] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for (_, c) in t.children(v) {
                index[c.index()] = order.len();
                order.push(c);
            }
            i += 1;
        }
        let mut nodes = Vec::with_capacity(order.len());
        for &v in &order {
            if t.children(v).any(|(s, _)| s > width) {
                return Err(ShapeError::TooWide {
                    arity: t.arity(v),
                    width,
                });
            }
            nodes.push(MolNode {
                depth: t.depth(v),
                parent: t.parent(v).map(|(p, s)| (index[p.index()], s)),
                children: (1..=width)
                    .map(|s| t.child(v, s).map(|c| index[c.index()]))
                    .collect(),
                label: Term::int(sugar_code(t.label(v))),
            });
        }
        Ok(MolView { nodes, width })
    }

    /// Full template of the given height and width with fresh sugar variables.
    pub fn template(
        pool: &mut VarPool,
        alphabet: &MonomerAlphabet,
        height: usize,
        width: usize,
    ) -> MolView {
        let s = alphabet.len() as i64;
        let nodes = full_tree(height, width)
            .into_iter()
            .enumerate()
            .map(|(j, (depth, parent, children))| MolNode {
                depth,
                parent,
                children: if children.is_empty() {
                    vec![None; width]
                } else {
                    children.into_iter().map(Some).collect()
                },
                label: pool.int_var(&format!("m_n{j}_sugar"), 0, s),
            })
            .collect();
        MolView { nodes, width }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn child(&self, v: usize, slot: usize) -> Option<usize> {
        if slot == 0 {
            return None;
        }
        self.nodes[v].children.get(slot - 1).copied().flatten()
    }

    pub fn present(&self, v: usize) -> Term {
        neq(self.nodes[v].label.clone(), Term::int(0))
    }

    pub fn ancestor(&self, v: usize, d: usize) -> Option<usize> {
        let mut cur = v;
        for _ in 0..d {
            cur = self.nodes[cur].parent?.0;
        }
        Some(cur)
    }

    /// Slots from `ancestor(v, d)` down to `v`.
    pub fn path_from_ancestor(&self, v: usize, d: usize) -> Option<Vec<usize>> {
        let mut path = Vec::with_capacity(d);
        let mut cur = v;
        for _ in 0..d {
            let (p, s) = self.nodes[cur].parent?;
            path.push(s);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    pub fn descend(&self, from: usize, path: &[usize]) -> Option<usize> {
        path.iter().try_fold(from, |v, &s| self.child(v, s))
    }

    pub fn label_vars(&self) -> Vec<VarId> {
        self.nodes.iter().filter_map(|n| n.label.as_var()).collect()
    }
}

/// Assignment of a template's variables that makes it denote `concrete` (a view of the
/// same shape built by [`concrete_rule_view`]).
pub fn rule_assignment(template: &RuleView, concrete: &RuleView) -> HashMap<VarId, Value> {
    let mut env = HashMap::new();
    let mut put = |t: &Term, c: &Term| {
        if let Some(v) = t.as_var() {
            let val = match (c.as_bool(), c.as_int()) {
                (Some(b), _) => Value::Bool(b),
                (_, Some(i)) => Value::Int(i),
                _ => panic!("concrete view holds a variable"),
            };
            env.insert(v, val);
        }
    };
    for (t, c) in template.nodes.iter().zip(&concrete.nodes) {
        put(&t.nu, &c.nu);
        put(&t.kappa, &c.kappa);
        put(&t.hard_end, &c.hard_end);
    }
    put(&template.compart, &concrete.compart);
    put(&template.fast, &concrete.fast);
    env
}

/// Assignment of a molecule template's labels that makes it denote `m`, or `None` when
/// `m` does not fit.
pub fn molecule_assignment(template: &MolView, m: &Molecule) -> Option<HashMap<VarId, Value>> {
    let t = m.tree();
    let mut env = HashMap::new();
    let mut placed = 0;
    for (u, node) in template.nodes.iter().enumerate() {
        let path = template.path_from_ancestor(u, node.depth).expect("root is an ancestor");
        let label = match t.descend(t.root(), &path) {
            Some(v) => {
                placed += 1;
                sugar_code(t.label(v))
            }
            None => 0,
        };
        env.insert(node.label.as_var()?, Value::Int(label));
    }
    (placed == t.len()).then_some(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_tree_counts() {
        assert_eq!(full_tree(2, 1).len(), 3);
        assert_eq!(full_tree(3, 2).len(), 15);
        for (d, w) in [(1, 3), (2, 2), (3, 3), (4, 2)] {
            assert_eq!(full_tree(d, w).len(), (w.pow(d as u32 + 1) - 1) / (w - 1));
            assert_eq!(rule_template_size(d + 1, w), full_tree(d, w).len());
        }
    }

    #[test]
    fn template_variables_are_distinct() {
        let a = MonomerAlphabet::from_pairs([("A", 2), ("B", 1), ("C", 1), ("D", 0)]).unwrap();
        let mut pool = VarPool::new();
        let shape = TemplateShape {
            depth: 3,
            width: 2,
            compartments: 2,
            hard_ends: true,
            fast_slow: true,
        };
        let ts = make_rule_templates(&mut pool, &a, &shape, 7);
        assert_eq!(ts.len(), 7);
        assert!(ts.iter().all(|t| t.nodes.len() == 7));
        let mut all: Vec<VarId> = ts.iter().flat_map(|t| t.vars()).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
        assert_eq!(n, 7 * (7 * 3 - 1 + 2));
    }
}
