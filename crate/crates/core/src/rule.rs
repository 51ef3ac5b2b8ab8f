use std::collections::BTreeSet;

use crate::error::ModelError;
use crate::tree::{NodeId, Tree};

/// Role of a template node. `Absent` only appears in templates, never in a concrete [`Rule`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Situation {
    Absent,
    Expand,
    MatchAns,
    Match,
}

impl Situation {
    pub const ALL: [Situation; 4] = [
        Situation::Absent,
        Situation::Expand,
        Situation::MatchAns,
        Situation::Match,
    ];

    /// Integer code used by the encoder.
    pub fn code(self) -> i64 {
        match self {
            Situation::Absent => 0,
            Situation::Expand => 1,
            Situation::MatchAns => 2,
            Situation::Match => 3,
        }
    }

    pub fn from_code(code: i64) -> Option<Self> {
        Situation::ALL.get(usize::try_from(code).ok()?).copied()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Speed {
    #[default]
    Slow,
    Fast,
}

/// A production rule: a pattern tree whose subtree at `expand_root` is the piece added
/// by one application, and whose remaining nodes must already be present.
///
/// The arena is kept in preorder so that derived equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    tree: Tree,
    expand_root: NodeId,
    hard_ends: BTreeSet<(NodeId, usize)>,
    compartment: u32,
    speed: Speed,
}

impl Rule {
    pub fn new(
        tree: Tree,
        expand_root: NodeId,
        hard_ends: impl IntoIterator<Item = (NodeId, usize)>,
        compartment: u32,
        speed: Speed,
    ) -> Result<Self, ModelError> {
        if !tree.contains(expand_root) {
            return Err(ModelError::NoSuchNode(expand_root.0));
        }
        if expand_root == tree.root() {
            return Err(ModelError::ExpandAtRoot);
        }
        if compartment == 0 {
            return Err(ModelError::ZeroCompartment);
        }
        let (canon, map) = tree.canonicalized();
        let expand_root = map[expand_root.index()];
        let mut ends = BTreeSet::new();
        for (node, slot) in hard_ends {
            if !tree.contains(node) {
                return Err(ModelError::NoSuchNode(node.0));
            }
            let node = map[node.index()];
            let ok = slot >= 1
                && slot <= canon.arity(node)
                && canon.child(node, slot).is_none()
                && !is_in_subtree(&canon, node, expand_root);
            if !ok {
                return Err(ModelError::BadHardEnd { node: node.0, slot });
            }
            ends.insert((node, slot));
        }
        Ok(Rule {
            tree: canon,
            expand_root,
            hard_ends: ends,
            compartment,
            speed,
        })
    }

    /// Rule with no hard ends, compartment 1 and slow speed.
    pub fn simple(tree: Tree, expand_root: NodeId) -> Result<Self, ModelError> {
        Rule::new(tree, expand_root, [], 1, Speed::Slow)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn expand_root(&self) -> NodeId {
        self.expand_root
    }

    pub fn hard_ends(&self) -> &BTreeSet<(NodeId, usize)> {
        &self.hard_ends
    }

    pub fn is_hard_end(&self, v: NodeId, slot: usize) -> bool {
        self.hard_ends.contains(&(v, slot))
    }

    pub fn compartment(&self) -> u32 {
        self.compartment
    }

    pub fn speed(&self) -> Speed {
        self.speed
    }

    pub fn is_fast(&self) -> bool {
        self.speed == Speed::Fast
    }

    /// Depth of the expand root below the rule root (ℓ ≥ 1).
    pub fn expand_depth(&self) -> usize {
        self.tree.depth(self.expand_root)
    }

    /// Slot of its parent in which the expand root hangs.
    pub fn expand_slot(&self) -> usize {
        self.tree.parent(self.expand_root).expect("expand root is not the root").1
    }

    /// Height of the rule tree.
    pub fn height(&self) -> usize {
        self.tree.height()
    }

    pub fn situation(&self, v: NodeId) -> Situation {
        if is_in_subtree(&self.tree, v, self.expand_root) {
            Situation::Expand
        } else if is_in_subtree(&self.tree, self.expand_root, v) {
            Situation::MatchAns
        } else {
            Situation::Match
        }
    }

    /// Copy of this rule placed in another compartment or speed class.
    pub fn with_stage(&self, compartment: u32, speed: Speed) -> Result<Self, ModelError> {
        if compartment == 0 {
            return Err(ModelError::ZeroCompartment);
        }
        Ok(Rule {
            compartment,
            speed,
            ..self.clone()
        })
    }

    /// Copy of this rule with its hard ends dropped.
    pub fn without_hard_ends(&self) -> Self {
        Rule {
            hard_ends: BTreeSet::new(),
            ..self.clone()
        }
    }
}

/// `v` lies in the subtree rooted at `top` (inclusive).
fn is_in_subtree(tree: &Tree, v: NodeId, top: NodeId) -> bool {
    let mut cur = v;
    loop {
        if cur == top {
            return true;
        }
        match tree.parent(cur) {
            Some((p, _)) => cur = p,
            None => return false,
        }
    }
}

/// Rules partitioned into `compartment_count` ordered stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    compartment_count: u32,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, compartment_count: u32) -> Result<Self, ModelError> {
        if compartment_count == 0 {
            return Err(ModelError::ZeroCompartment);
        }
        if let Some(r) = rules.iter().find(|r| r.compartment > compartment_count) {
            return Err(ModelError::CompartmentOutOfRange {
                compartment: r.compartment,
                count: compartment_count,
            });
        }
        Ok(RuleSet {
            rules,
            compartment_count,
        })
    }

    /// Rule set whose compartment count is the largest compartment used (at least 1).
    pub fn from_rules(rules: Vec<Rule>) -> Self {
        let k = rules.iter().map(|r| r.compartment).max().unwrap_or(1);
        RuleSet {
            rules,
            compartment_count: k,
        }
    }

    pub fn empty() -> Self {
        RuleSet {
            rules: Vec::new(),
            compartment_count: 1,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn compartment_count(&self) -> u32 {
        self.compartment_count
    }

    pub fn in_compartment(&self, c: u32) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(move |r| r.compartment == c)
    }

    pub fn has_hard_ends(&self) -> bool {
        self.rules.iter().any(|r| !r.hard_ends.is_empty())
    }

    pub fn has_fast(&self) -> bool {
        self.rules.iter().any(Rule::is_fast)
    }
}
