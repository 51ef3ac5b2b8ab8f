use crate::tree::{Molecule, NodeId, Tree};

/// Limits for accepting molecules that pump a repeating unit: up to `r0` extra copies
/// of a unit whose spine is at most `d0` slots long.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepeatConfig {
    pub d0: usize,
    pub r0: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("repeat window {d0}x{r0} does not fit in molecule height {height}")]
pub struct RepeatFitError {
    pub d0: usize,
    pub r0: usize,
    pub height: usize,
}

impl RepeatConfig {
    pub fn check_fits(&self, height: usize) -> Result<(), RepeatFitError> {
        if self.d0 * self.r0 > height {
            Err(RepeatFitError {
                d0: self.d0,
                r0: self.r0,
                height,
            })
        } else {
            Ok(())
        }
    }
}

/// `m` is an acceptable intermediate with respect to the observed molecule `o`.
pub fn accepted(m: &Molecule, o: &Molecule, repeats: Option<RepeatConfig>) -> bool {
    match repeats {
        Some(rc) if rc.r0 > 0 && rc.d0 > 0 => accepted_at(m, m.root(), o, o.root(), rc),
        _ => m.is_rooted_prefix_of(o),
    }
}

/// `m` is an acceptable intermediate with respect to some molecule of `observed`.
pub fn accepted_by_any(m: &Molecule, observed: &[Molecule], repeats: Option<RepeatConfig>) -> bool {
    observed.iter().any(|o| accepted(m, o, repeats))
}

fn accepted_at(m: &Tree, v: NodeId, o: &Tree, ov: NodeId, rc: RepeatConfig) -> bool {
    let plain = m.label(v) == o.label(ov)
        && m.children(v).all(|(slot, c)| match o.child(ov, slot) {
            Some(oc) => accepted_at(m, c, o, oc, rc),
            None => false,
        });
    plain || repeated_at(m, v, o, ov, rc)
}

/// Some spine `path` of length ≤ d0 and count r ≤ r0 make `r` consecutive units starting
/// at `v` identical to their successor, and the node after the last unit is a plain
/// rooted prefix of `ov`.
fn repeated_at(m: &Tree, v: NodeId, o: &Tree, ov: NodeId, rc: RepeatConfig) -> bool {
    let mut path = Vec::new();
    spines(m, v, rc.d0, &mut path, &mut |path| {
        let mut heads = vec![v];
        for r in 1..=rc.r0 {
            let prev = heads[r - 1];
            let Some(next) = m.descend(prev, path) else {
                return false;
            };
            if !unit_eq(m, prev, next, path) {
                return false;
            }
            heads.push(next);
            if m.matches_at(next, o, ov) {
                return true;
            }
        }
        false
    })
}

/// Calls `f` on every existing slot path of length 1..=max below `v` until it returns true.
fn spines(
    m: &Tree,
    v: NodeId,
    max: usize,
    path: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if path.len() == max {
        return false;
    }
    for (slot, c) in m.children(v) {
        path.push(slot);
        let hit = f(path) || spines(m, c, max, path, f);
        path.pop();
        if hit {
            return true;
        }
    }
    false
}

/// Subtrees at `a` and `b` agree exactly, except that comparison stops at the position
/// `rest` below `a`.
fn unit_eq(m: &Tree, a: NodeId, b: NodeId, rest: &[usize]) -> bool {
    if m.label(a) != m.label(b) {
        return false;
    }
    (1..=m.arity(a)).all(|slot| {
        let on_spine = rest.first() == Some(&slot);
        if on_spine && rest.len() == 1 {
            return true;
        }
        let tail: &[usize] = if on_spine { &rest[1..] } else { &[] };
        match (m.child(a, slot), m.child(b, slot)) {
            (None, None) => true,
            (Some(x), Some(y)) => {
                if on_spine {
                    unit_eq(m, x, y, tail)
                } else {
                    exact_eq(m, x, y)
                }
            }
            _ => false,
        }
    })
}

fn exact_eq(m: &Tree, a: NodeId, b: NodeId) -> bool {
    m.label(a) == m.label(b)
        && (1..=m.arity(a)).all(|slot| match (m.child(a, slot), m.child(b, slot)) {
            (None, None) => true,
            (Some(x), Some(y)) => exact_eq(m, x, y),
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::MonomerAlphabet;
    use crate::parse::parse_molecule;

    fn chain() -> MonomerAlphabet {
        MonomerAlphabet::from_pairs([("A", 1), ("B", 1), ("C", 0), ("X", 2)]).unwrap()
    }

    #[test]
    fn pumped_chain_is_accepted_within_limits() {
        let a = chain();
        let o = parse_molecule(&a, "A(B)").unwrap();
        let bb = parse_molecule(&a, "A(B(B))").unwrap();
        let bbb = parse_molecule(&a, "A(B(B(B)))").unwrap();
        assert!(!accepted(&bb, &o, None));
        assert!(!accepted(&bb, &o, Some(RepeatConfig { d0: 1, r0: 0 })));
        assert!(accepted(&bb, &o, Some(RepeatConfig { d0: 1, r0: 1 })));
        assert!(!accepted(&bbb, &o, Some(RepeatConfig { d0: 1, r0: 1 })));
        assert!(accepted(&bbb, &o, Some(RepeatConfig { d0: 1, r0: 2 })));
    }

    #[test]
    fn difference_outside_the_repeat_is_rejected() {
        let a = chain();
        let o = parse_molecule(&a, "A(B(C))").unwrap();
        let rc = Some(RepeatConfig { d0: 1, r0: 2 });
        assert!(accepted(&parse_molecule(&a, "A(B(B(C)))").unwrap(), &o, rc));
        assert!(!accepted(&parse_molecule(&a, "A(B(B(A)))").unwrap(), &o, rc));
        assert!(!accepted(&parse_molecule(&a, "B(B(C))").unwrap(), &o, rc));
    }

    #[test]
    fn units_compare_side_branches() {
        let a = chain();
        let o = parse_molecule(&a, "X(C, _)").unwrap();
        let rc = Some(RepeatConfig { d0: 1, r0: 1 });
        assert!(accepted(&parse_molecule(&a, "X(C, X(C, _))").unwrap(), &o, rc));
        assert!(!accepted(&parse_molecule(&a, "X(C, X(_, _))").unwrap(), &o, rc));
    }

    #[test]
    fn window_must_fit() {
        assert!(RepeatConfig { d0: 2, r0: 2 }.check_fits(4).is_ok());
        assert!(RepeatConfig { d0: 2, r0: 3 }.check_fits(5).is_err());
    }
}
