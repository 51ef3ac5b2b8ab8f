use std::hash::{Hash, Hasher};

use crate::alphabet::{MonomerAlphabet, SugarId};
use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
struct TreeNode {
    label: SugarId,
    /// `children[i - 1]` is the child in slot `i`; the length is the arity of `label`.
    children: Vec<Option<NodeId>>,
    parent: Option<(NodeId, usize)>,
}

/// Rooted tree with monomer labels and 1-based indexed child slots.
///
/// Nodes live in an arena; the root is always `NodeId(0)`. Equality and
/// hashing are structural: two trees are equal when labels agree and every
/// slot holds equal subtrees, regardless of how their arenas are numbered.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Single-node tree labeled `label`.
    pub fn leaf(alphabet: &MonomerAlphabet, label: SugarId) -> Self {
        Tree {
            nodes: vec![TreeNode {
                label,
                children: vec![None; alphabet.arity(label)],
                parent: None,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn label(&self, v: NodeId) -> SugarId {
        self.nodes[v.index()].label
    }

    /// Number of slots of `v`, i.e. the arity of its label.
    pub fn arity(&self, v: NodeId) -> usize {
        self.nodes[v.index()].children.len()
    }

    /// Child of `v` in `slot` (1-based). Slot 0 and slots beyond the arity are always empty.
    pub fn child(&self, v: NodeId, slot: usize) -> Option<NodeId> {
        if slot == 0 {
            return None;
        }
        self.nodes[v.index()]
            .children
            .get(slot - 1)
            .copied()
            .flatten()
    }

    /// Present children of `v` as `(slot, child)` in ascending slot order.
    pub fn children(&self, v: NodeId) -> impl Iterator<Item = (usize, NodeId)> + '_ {
        self.nodes[v.index()]
            .children
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (i + 1, c)))
    }

    pub fn number_of_children(&self, v: NodeId) -> usize {
        self.children(v).count()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.number_of_children(v) == 0
    }

    pub fn parent(&self, v: NodeId) -> Option<(NodeId, usize)> {
        self.nodes[v.index()].parent
    }

    pub fn depth(&self, v: NodeId) -> usize {
        let mut d = 0;
        let mut cur = v;
        while let Some((p, _)) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// Length of the longest root-to-leaf path; a single node has height 0.
    pub fn height(&self) -> usize {
        self.height_at(self.root())
    }

    pub fn height_at(&self, v: NodeId) -> usize {
        self.children(v)
            .map(|(_, c)| 1 + self.height_at(c))
            .max()
            .unwrap_or(0)
    }

    /// The `d`-th ancestor of `v`; `None` once the walk leaves the root.
    pub fn ancestor(&self, v: NodeId, d: usize) -> Option<NodeId> {
        let mut cur = v;
        for _ in 0..d {
            cur = self.parent(cur)?.0;
        }
        Some(cur)
    }

    /// Path of slots from the root down to `v`.
    pub fn slot_path(&self, v: NodeId) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((p, slot)) = self.parent(cur) {
            path.push(slot);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Follows `path` (a sequence of slots) from `from`.
    pub fn descend(&self, from: NodeId, path: &[usize]) -> Option<NodeId> {
        path.iter().try_fold(from, |v, &slot| self.child(v, slot))
    }

    /// Adds a fresh node labeled `label` in `slot` of `parent`.
    pub fn add_child(
        &mut self,
        alphabet: &MonomerAlphabet,
        parent: NodeId,
        slot: usize,
        label: SugarId,
    ) -> Result<NodeId, ModelError> {
        self.check_free_slot(alphabet, parent, slot)?;
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(TreeNode {
            label,
            children: vec![None; alphabet.arity(label)],
            parent: Some((parent, slot)),
        });
        self.nodes[parent.index()].children[slot - 1] = Some(id);
        Ok(id)
    }

    /// Attaches a fresh copy of the subtree of `source` rooted at `from` in `slot` of `parent`.
    /// Returns the id of the copied root.
    pub fn attach_copy(
        &mut self,
        alphabet: &MonomerAlphabet,
        parent: NodeId,
        slot: usize,
        source: &Tree,
        from: NodeId,
    ) -> Result<NodeId, ModelError> {
        let new_root = self.add_child(alphabet, parent, slot, source.label(from))?;
        let mut stack = vec![(from, new_root)];
        while let Some((src, dst)) = stack.pop() {
            for (s, c) in source.children(src) {
                let id = self.add_child(alphabet, dst, s, source.label(c))?;
                stack.push((c, id));
            }
        }
        Ok(new_root)
    }

    fn check_free_slot(
        &self,
        alphabet: &MonomerAlphabet,
        parent: NodeId,
        slot: usize,
    ) -> Result<(), ModelError> {
        if !self.contains(parent) {
            return Err(ModelError::NoSuchNode(parent.0));
        }
        let arity = self.arity(parent);
        if slot == 0 || slot > arity {
            return Err(ModelError::SlotOutOfRange {
                name: alphabet.name(self.label(parent)).to_string(),
                slot,
                arity,
            });
        }
        if self.child(parent, slot).is_some() {
            return Err(ModelError::SlotOccupied {
                node: parent.0,
                slot,
            });
        }
        Ok(())
    }

    /// Copy of the subtree rooted at `v` as a standalone tree.
    pub fn subtree(&self, alphabet: &MonomerAlphabet, v: NodeId) -> Tree {
        let mut out = Tree::leaf(alphabet, self.label(v));
        let mut stack = vec![(v, out.root())];
        while let Some((src, dst)) = stack.pop() {
            for (s, c) in self.children(src) {
                let id = out
                    .add_child(alphabet, dst, s, self.label(c))
                    .expect("copy of a well-formed tree");
                stack.push((c, id));
            }
        }
        out
    }

    /// Renumbers the arena in preorder (slots ascending). Returns the new tree and
    /// the old-to-new id map.
    pub fn canonicalized(&self) -> (Tree, Vec<NodeId>) {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            order.push(v);
            let kids: Vec<_> = self.children(v).map(|(_, c)| c).collect();
            stack.extend(kids.into_iter().rev());
        }
        let mut map = vec![NodeId(0); self.len()];
        for (new, old) in order.iter().enumerate() {
            map[old.index()] = NodeId(new as u32);
        }
        let nodes = order
            .iter()
            .map(|old| {
                let n = &self.nodes[old.index()];
                TreeNode {
                    label: n.label,
                    children: n.children.iter().map(|c| c.map(|c| map[c.index()])).collect(),
                    parent: n.parent.map(|(p, s)| (map[p.index()], s)),
                }
            })
            .collect();
        (Tree { nodes }, map)
    }

    /// Embedding test: labels agree at `(v, v2)` and recursively at every child present
    /// under `v`; `other` may carry extra children.
    pub fn matches_at(&self, v: NodeId, other: &Tree, v2: NodeId) -> bool {
        if self.label(v) != other.label(v2) {
            return false;
        }
        self.children(v).all(|(slot, c)| match other.child(v2, slot) {
            Some(c2) => self.matches_at(c, other, c2),
            None => false,
        })
    }

    fn eq_at(&self, v: NodeId, other: &Tree, v2: NodeId) -> bool {
        self.label(v) == other.label(v2)
            && self.arity(v) == other.arity(v2)
            && (1..=self.arity(v)).all(|s| match (self.child(v, s), other.child(v2, s)) {
                (None, None) => true,
                (Some(a), Some(b)) => self.eq_at(a, other, b),
                _ => false,
            })
    }

    fn hash_at<H: Hasher>(&self, v: NodeId, state: &mut H) {
        self.label(v).hash(state);
        for s in 1..=self.arity(v) {
            match self.child(v, s) {
                Some(c) => {
                    1u8.hash(state);
                    self.hash_at(c, state);
                }
                None => 0u8.hash(state),
            }
        }
    }

    /// Number of nodes in the subtree rooted at `v`.
    pub fn subtree_size(&self, v: NodeId) -> usize {
        1 + self
            .children(v)
            .map(|(_, c)| self.subtree_size(c))
            .sum::<usize>()
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.eq_at(self.root(), other, other.root())
    }
}

impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.hash_at(self.root(), state)
    }
}

/// An observed or produced glycan: a [`Tree`] whose every node respects its monomer arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Molecule(Tree);

impl Molecule {
    pub fn new(tree: Tree) -> Self {
        Molecule(tree)
    }

    pub fn single(alphabet: &MonomerAlphabet, label: SugarId) -> Self {
        Molecule(Tree::leaf(alphabet, label))
    }

    pub fn tree(&self) -> &Tree {
        &self.0
    }

    pub fn into_tree(self) -> Tree {
        self.0
    }

    /// `self` embeds into `other` at the roots, i.e. `self` is an acceptable
    /// intermediate on the way to `other`.
    pub fn is_rooted_prefix_of(&self, other: &Molecule) -> bool {
        self.0.matches_at(self.0.root(), &other.0, other.0.root())
    }
}

impl std::ops::Deref for Molecule {
    type Target = Tree;

    fn deref(&self) -> &Tree {
        &self.0
    }
}
