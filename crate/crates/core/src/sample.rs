//! Random alphabets, molecules and rules for property tests and benchmark jobs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alphabet::{MonomerAlphabet, SugarId};
use crate::rule::{Rule, Speed};
use crate::tree::{Molecule, NodeId, Tree};

/// Alphabet `A, B, C, ...` of `size` monomers with arities in `0..=max_arity`; the first
/// monomer always has arity `max_arity` so that something can grow.
pub fn random_alphabet<R: Rng>(rng: &mut R, size: usize, max_arity: usize) -> MonomerAlphabet {
    assert!((1..=26).contains(&size));
    let mut a = MonomerAlphabet::new();
    for i in 0..size {
        let arity = if i == 0 {
            max_arity
        } else {
            rng.gen_range(0..=max_arity)
        };
        let name = ((b'A' + i as u8) as char).to_string();
        a.declare(&name, arity).expect("fresh single-letter names");
    }
    a
}

fn random_label<R: Rng>(alphabet: &MonomerAlphabet, rng: &mut R) -> SugarId {
    SugarId(rng.gen_range(0..alphabet.len()) as u16)
}

/// Random tree of height at most `max_height`; each free slot is filled with probability `fill`.
pub fn random_tree<R: Rng>(
    alphabet: &MonomerAlphabet,
    rng: &mut R,
    root: Option<SugarId>,
    max_height: usize,
    fill: f64,
) -> Tree {
    let root = root.unwrap_or_else(|| random_label(alphabet, rng));
    let mut t = Tree::leaf(alphabet, root);
    let mut stack = vec![(t.root(), 0)];
    while let Some((v, depth)) = stack.pop() {
        if depth == max_height {
            continue;
        }
        for slot in 1..=t.arity(v) {
            if rng.gen_bool(fill) {
                let label = random_label(alphabet, rng);
                let c = t.add_child(alphabet, v, slot, label).expect("free slot");
                stack.push((c, depth + 1));
            }
        }
    }
    t
}

pub fn random_molecule<R: Rng>(
    alphabet: &MonomerAlphabet,
    rng: &mut R,
    root: Option<SugarId>,
    max_height: usize,
    fill: f64,
) -> Molecule {
    Molecule::new(random_tree(alphabet, rng, root, max_height, fill))
}

/// Knobs for [`random_rule`].
#[derive(Clone, Copy, Debug)]
pub struct RuleSampling {
    /// Rule trees span at most `depth` levels (height `depth - 1`); must be at least 2.
    pub depth: usize,
    pub fill: f64,
    pub hard_end_prob: f64,
    pub compartments: u32,
    pub fast_prob: f64,
}

impl RuleSampling {
    pub fn plain(depth: usize) -> Self {
        RuleSampling {
            depth,
            fill: 0.5,
            hard_end_prob: 0.0,
            compartments: 1,
            fast_prob: 0.0,
        }
    }
}

/// Random well-formed rule, or `None` when the sampled tree has no eligible expand root.
pub fn random_rule<R: Rng>(
    alphabet: &MonomerAlphabet,
    rng: &mut R,
    opts: &RuleSampling,
) -> Option<Rule> {
    let t = random_tree(alphabet, rng, None, opts.depth.saturating_sub(1), opts.fill);
    let eligible: Vec<NodeId> = t.node_ids().filter(|&v| v != t.root()).collect();
    let &expand = eligible.choose(rng)?;
    let mut ends = Vec::new();
    if opts.hard_end_prob > 0.0 {
        for v in t.node_ids() {
            if is_below(&t, v, expand) || t.depth(v) + 2 > opts.depth {
                continue;
            }
            for slot in 1..=t.arity(v) {
                if t.child(v, slot).is_none() && rng.gen_bool(opts.hard_end_prob) {
                    ends.push((v, slot));
                }
            }
        }
    }
    let compartment = rng.gen_range(1..=opts.compartments.max(1));
    let speed = if opts.fast_prob > 0.0 && rng.gen_bool(opts.fast_prob) {
        Speed::Fast
    } else {
        Speed::Slow
    };
    Rule::new(t, expand, ends, compartment, speed).ok()
}

fn is_below(t: &Tree, v: NodeId, top: NodeId) -> bool {
    let mut cur = Some(v);
    while let Some(c) = cur {
        if c == top {
            return true;
        }
        cur = t.parent(c).map(|(p, _)| p);
    }
    false
}

/// Random rooted prefix of `m`: every non-root subtree is kept with probability `keep`.
pub fn random_prefix<R: Rng>(
    alphabet: &MonomerAlphabet,
    m: &Molecule,
    rng: &mut R,
    keep: f64,
) -> Molecule {
    let mut out = Tree::leaf(alphabet, m.label(m.root()));
    let mut stack = vec![(m.root(), out.root())];
    while let Some((src, dst)) = stack.pop() {
        for (slot, c) in m.children(src) {
            if rng.gen_bool(keep) {
                let id = out
                    .add_child(alphabet, dst, slot, m.label(c))
                    .expect("mirrors a well-formed tree");
                stack.push((c, id));
            }
        }
    }
    Molecule::new(out)
}
