//! Exhaustive search over small rule spaces, checked by the oracle alone.

use std::time::Instant;

use glycan_core::{verify, MonomerAlphabet, NodeId, Rule, RuleSet, Speed, SugarId, Tree};

use crate::job::{JobError, Status, SynthesisJob, SynthesisOutcome};

pub const MAX_CANDIDATE_SETS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteError {
    #[error(transparent)]
    Job(#[from] JobError),
    #[error("rule space too large to enumerate ({0} candidates)")]
    TooLarge(u128),
}

#[derive(Clone, Debug)]
struct Shape {
    label: SugarId,
    children: Vec<Option<Shape>>,
}

fn count_shapes(alphabet: &MonomerAlphabet, height: usize) -> u128 {
    let below = if height == 0 {
        0
    } else {
        count_shapes(alphabet, height - 1)
    };
    alphabet
        .ids()
        .map(|s| (1 + below).saturating_pow(alphabet.arity(s) as u32))
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn shapes(alphabet: &MonomerAlphabet, height: usize) -> Vec<Shape> {
    let below = if height == 0 {
        Vec::new()
    } else {
        shapes(alphabet, height - 1)
    };
    let mut out = Vec::new();
    for s in alphabet.ids() {
        let mut partial: Vec<Vec<Option<Shape>>> = vec![Vec::new()];
        for _ in 0..alphabet.arity(s) {
            let mut next = Vec::new();
            for p in &partial {
                let mut none = p.clone();
                none.push(None);
                next.push(none);
                for b in &below {
                    let mut with = p.clone();
                    with.push(Some(b.clone()));
                    next.push(with);
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|children| Shape { label: s, children }));
    }
    out
}

fn build(alphabet: &MonomerAlphabet, shape: &Shape) -> Tree {
    let mut t = Tree::leaf(alphabet, shape.label);
    let mut stack = vec![(shape, t.root())];
    while let Some((sh, id)) = stack.pop() {
        for (i, c) in sh.children.iter().enumerate() {
            if let Some(c) = c {
                let cid = t
                    .add_child(alphabet, id, i + 1, c.label)
                    .expect("shape respects arity");
                stack.push((c, cid));
            }
        }
    }
    t
}

fn in_subtree(t: &Tree, v: NodeId, root: NodeId) -> bool {
    let mut cur = Some(v);
    while let Some(c) = cur {
        if c == root {
            return true;
        }
        cur = t.parent(c).map(|p| p.0);
    }
    false
}

/// Every rule spanning at most `depth` levels over the alphabet, with hard ends, compartments
/// and speeds as enabled.
pub fn enumerate_rules(
    alphabet: &MonomerAlphabet,
    depth: usize,
    compartments: u32,
    hard_ends: bool,
    fast_slow: bool,
) -> Result<Vec<Rule>, BruteError> {
    let trees = count_shapes(alphabet, depth - 1);
    if trees > MAX_CANDIDATE_SETS {
        return Err(BruteError::TooLarge(trees));
    }
    let speeds: &[Speed] = if fast_slow {
        &[Speed::Slow, Speed::Fast]
    } else {
        &[Speed::Slow]
    };
    let mut out = Vec::new();
    for shape in shapes(alphabet, depth - 1) {
        let t = build(alphabet, &shape);
        let t = &t;
        for e in t.node_ids() {
            if e == t.root() || t.depth(e) >= depth {
                continue;
            }
            let slots: Vec<(NodeId, usize)> = if hard_ends {
                t.node_ids()
                    .filter(|&v| !in_subtree(t, v, e) && t.depth(v) + 2 <= depth)
                    .flat_map(|v| {
                        (1..=t.arity(v))
                            .filter(move |&s| t.child(v, s).is_none())
                            .map(move |s| (v, s))
                    })
                    .collect()
            } else {
                Vec::new()
            };
            if slots.len() > 20 {
                return Err(BruteError::TooLarge(1 << slots.len()));
            }
            for mask in 0u32..(1 << slots.len()) {
                let ends: Vec<_> = (0..slots.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| slots[i])
                    .collect();
                for c in 1..=compartments {
                    for &speed in speeds {
                        let r = Rule::new(t.clone(), e, ends.iter().copied(), c, speed)
                            .expect("enumerated rule is well formed");
                        out.push(r);
                    }
                }
            }
            if out.len() as u128 > MAX_CANDIDATE_SETS {
                return Err(BruteError::TooLarge(out.len() as u128));
            }
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Finds a rule set of at most `n` rules that passes verification, or proves none exists
/// within the budgets. Uses only the oracle.
pub fn brute_force_synth(job: &SynthesisJob) -> Result<SynthesisOutcome, BruteError> {
    let start = Instant::now();
    job.validate()?;
    let data = &job.dataset;
    let b = &job.budgets;
    let cfg = job.closure_config();
    let passes = |rules: Vec<Rule>| -> Option<RuleSet> {
        let rs = RuleSet::new(rules, b.k).ok()?;
        let report = verify(&rs, data, &cfg).ok()?;
        report.passed().then_some(rs)
    };
    let mut out = SynthesisOutcome::new(Status::NoRulesInBudget);
    if b.n == 0 {
        if let Some(rs) = passes(Vec::new()) {
            out.status = Status::Synthesized;
            out.rules = Some(rs);
        }
        out.elapsed = start.elapsed();
        return Ok(out);
    }
    let mut candidates = enumerate_rules(
        data.alphabet(),
        b.d,
        b.k,
        job.variants.hard_ends,
        job.variants.fast_slow,
    )?;
    if !job.variants.fast_slow {
        // Without dominance, adding rules never removes molecules, so a rule that
        // produces an unacceptable molecule on its own can be dropped.
        candidates.retain(|r| {
            let rs = RuleSet::new(vec![r.clone()], b.k).expect("compartment within budget");
            verify(&rs, data, &cfg).map_or(true, |rep| rep.extras.is_empty())
        });
    }
    let m = candidates.len();
    let sets: u128 = (1..=b.n.min(m)).map(|s| binomial(m, s)).sum();
    if sets > MAX_CANDIDATE_SETS {
        return Err(BruteError::TooLarge(sets));
    }
    for size in 1..=b.n.min(m) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.iterations += 1;
            if let Some(rs) = passes(idx.iter().map(|&i| candidates[i].clone()).collect()) {
                out.status = Status::Synthesized;
                out.rules = Some(rs);
                out.elapsed = start.elapsed();
                return Ok(out);
            }
            let Some(i) = (0..size).rev().find(|&i| idx[i] != i + m - size) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out.elapsed = start.elapsed();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts_agree_with_enumeration() {
        let a = MonomerAlphabet::from_pairs([("A", 2), ("B", 1), ("C", 0)]).unwrap();
        for h in 0..3 {
            assert_eq!(shapes(&a, h).len() as u128, count_shapes(&a, h));
        }
        assert_eq!(count_shapes(&a, 0), 3);
        // A: (1 + 3)^2, B: 1 + 3, C: 1
        assert_eq!(count_shapes(&a, 1), 21);
    }

    #[test]
    fn rules_have_expand_root_above_depth() {
        let a = MonomerAlphabet::from_pairs([("A", 2), ("B", 0)]).unwrap();
        let rules = enumerate_rules(&a, 2, 1, false, false).unwrap();
        assert!(rules.iter().all(|r| r.expand_depth() == 1 && r.height() == 1));
        // A over {_, A, B} in each slot, minus the childless one, with one expand root
        // per child: 2 * 2 (one child) + 2 * 4 (two children).
        assert_eq!(rules.len(), 12);
        let deeper = enumerate_rules(&a, 3, 1, false, false).unwrap();
        assert!(deeper.iter().all(|r| r.height() <= 2 && r.expand_depth() <= 2));
        assert!(deeper.iter().any(|r| r.expand_depth() == 2));
        let distinct: std::collections::HashSet<_> = rules.iter().collect();
        assert_eq!(distinct.len(), rules.len());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(52, 5), 2_598_960);
    }
}
