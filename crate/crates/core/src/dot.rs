use std::fmt::Write;

use crate::alphabet::MonomerAlphabet;
use crate::rule::{Rule, Situation};
use crate::tree::{Molecule, NodeId, Tree};

/// Graphviz digraph of a molecule; edges are labeled with their slot.
pub fn molecule_to_dot(alphabet: &MonomerAlphabet, m: &Molecule, name: &str) -> String {
    let mut out = format!("digraph \"{}\" {{\n", escape(name));
    for v in m.node_ids() {
        let _ = writeln!(
            out,
            "  n{} [label=\"{}\", shape=ellipse];",
            v.0,
            escape(alphabet.name(m.label(v)))
        );
    }
    edges(m.tree(), &mut out);
    out.push_str("}\n");
    out
}

/// Graphviz digraph of a rule: expanding nodes are boxes, matching nodes ellipses
/// (doubly outlined on the path to the expand root), hard ends are dashed stubs.
pub fn rule_to_dot(alphabet: &MonomerAlphabet, r: &Rule, name: &str) -> String {
    let t = r.tree();
    let mut out = format!("digraph \"{}\" {{\n", escape(name));
    if r.compartment() != 1 || r.is_fast() {
        let _ = writeln!(
            out,
            "  label=\"comp={}{}\";",
            r.compartment(),
            if r.is_fast() { ", fast" } else { "" }
        );
    }
    for v in t.node_ids() {
        let shape = match r.situation(v) {
            Situation::Expand => "box",
            Situation::MatchAns => "ellipse, peripheries=2",
            _ => "ellipse",
        };
        let _ = writeln!(
            out,
            "  n{} [label=\"{}\", shape={}];",
            v.0,
            escape(alphabet.name(t.label(v))),
            shape
        );
    }
    edges(t, &mut out);
    for &(NodeId(v), slot) in r.hard_ends() {
        let _ = writeln!(out, "  h{v}_{slot} [label=\"\", shape=Mcircle, width=0.2];");
        let _ = writeln!(out, "  n{v} -> h{v}_{slot} [label=\"{slot}\", style=dashed];");
    }
    out.push_str("}\n");
    out
}

fn edges(t: &Tree, out: &mut String) {
    for v in t.node_ids() {
        for (slot, c) in t.children(v) {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", v.0, c.0, slot);
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rules;

    #[test]
    fn expand_nodes_are_boxes() {
        let f = parse_rules("sugar A 2; sugar B 0\nrule A(*A, B)").unwrap();
        let dot = rule_to_dot(&f.alphabet, &f.rules[0], "r1");
        assert!(dot.starts_with("digraph \"r1\" {"));
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("shape=ellipse").count(), 2);
        assert_eq!(dot.matches("->").count(), 2);
    }
}
