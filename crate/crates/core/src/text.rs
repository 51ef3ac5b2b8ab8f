use std::fmt::Write;

use crate::alphabet::MonomerAlphabet;
use crate::dataset::Dataset;
use crate::rule::{Rule, Speed};
use crate::tree::{Molecule, NodeId, Tree};

/// Canonical text of a molecule: slots in ascending order, `_` for empty slots, bare leaves.
pub fn molecule_to_string(alphabet: &MonomerAlphabet, m: &Molecule) -> String {
    let mut out = String::new();
    write_tree(alphabet, m.tree(), m.root(), None, &mut out);
    out
}

/// Canonical text of a rule tree with `*` on the expand root, `!` on hard ends and
/// `@comp=` / `@fast` attributes when they differ from the defaults.
pub fn rule_to_string(alphabet: &MonomerAlphabet, r: &Rule) -> String {
    let mut out = String::new();
    write_tree(alphabet, r.tree(), r.tree().root(), Some(r), &mut out);
    if r.compartment() != 1 {
        let _ = write!(out, " @comp={}", r.compartment());
    }
    if r.speed() == Speed::Fast {
        out.push_str(" @fast");
    }
    out
}

fn write_tree(
    alphabet: &MonomerAlphabet,
    t: &Tree,
    v: NodeId,
    rule: Option<&Rule>,
    out: &mut String,
) {
    if rule.is_some_and(|r| r.expand_root() == v) {
        out.push('*');
    }
    out.push_str(alphabet.name(t.label(v)));
    let arity = t.arity(v);
    let has_content = t.number_of_children(v) > 0
        || rule.is_some_and(|r| (1..=arity).any(|s| r.is_hard_end(v, s)));
    if !has_content {
        return;
    }
    out.push('(');
    for slot in 1..=arity {
        if slot > 1 {
            out.push_str(", ");
        }
        match t.child(v, slot) {
            Some(c) => write_tree(alphabet, t, c, rule, out),
            None if rule.is_some_and(|r| r.is_hard_end(v, slot)) => out.push('!'),
            None => out.push('_'),
        }
    }
    out.push(')');
}

/// Dataset text that re-parses to an equal dataset.
pub fn dataset_to_string(d: &Dataset) -> String {
    let mut out = d.alphabet().to_string();
    for m in d.molecules() {
        let _ = writeln!(out, "mol {}", molecule_to_string(d.alphabet(), m));
    }
    out
}

/// Rule-file text: the alphabet declarations followed by one `rule` line per rule.
pub fn rules_to_string(alphabet: &MonomerAlphabet, rules: &[Rule]) -> String {
    let mut out = alphabet.to_string();
    for r in rules {
        let _ = writeln!(out, "rule {}", rule_to_string(alphabet, r));
    }
    out
}
