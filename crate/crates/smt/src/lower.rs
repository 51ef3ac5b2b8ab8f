//! SMT-LIB2 text for formulas and declarations.

use std::collections::HashMap;
use std::fmt::Write;

use crate::formula::{and, substitute, Node, Sort, Term, VarId, VarPool};

pub const DEFAULT_EXPAND_THRESHOLD: u64 = 4096;

/// How universal quantifiers are emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantifierLowering {
    /// Expand by substitution when the domain product is at most `threshold`, else native.
    Auto {
        threshold: u64,
    },
    Native,
    /// Always expand; fails for domains over `u32::MAX` combinations.
    Expand,
}

impl Default for QuantifierLowering {
    fn default() -> Self {
        QuantifierLowering::Auto {
            threshold: DEFAULT_EXPAND_THRESHOLD,
        }
    }
}

pub fn declare(pool: &VarPool, v: VarId) -> Vec<String> {
    let d = pool.decl(v);
    match d.sort {
        Sort::Bool => vec![format!("(declare-fun {} () Bool)", d.name)],
        Sort::Int { lo, hi } => vec![
            format!("(declare-fun {} () Int)", d.name),
            format!(
                "(assert (and (<= {} {}) (<= {} {})))",
                int(lo),
                d.name,
                d.name,
                int(hi)
            ),
        ],
    }
}

fn int(i: i64) -> String {
    if i < 0 {
        format!("(- {})", -(i as i128))
    } else {
        i.to_string()
    }
}

pub fn assertion(pool: &VarPool, t: &Term, mode: QuantifierLowering) -> String {
    let mut out = String::from("(assert ");
    write_term(pool, t, mode, &mut out);
    out.push(')');
    out
}

pub fn term_to_string(pool: &VarPool, t: &Term, mode: QuantifierLowering) -> String {
    let mut out = String::new();
    write_term(pool, t, mode, &mut out);
    out
}

fn write_term(pool: &VarPool, t: &Term, mode: QuantifierLowering, out: &mut String) {
    let app = |op: &str, args: &[&Term], out: &mut String| {
        out.push('(');
        out.push_str(op);
        for a in args {
            out.push(' ');
            write_term(pool, a, mode, out);
        }
        out.push(')');
    };
    match t.node() {
        Node::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Node::Int(i) => out.push_str(&int(*i)),
        Node::Var(v) => out.push_str(pool.name(*v)),
        Node::Not(a) => app("not", &[a], out),
        Node::And(xs) => app("and", &xs.iter().collect::<Vec<_>>(), out),
        Node::Or(xs) => app("or", &xs.iter().collect::<Vec<_>>(), out),
        Node::Implies(a, b) => app("=>", &[a, b], out),
        Node::Eq(a, b) => app("=", &[a, b], out),
        Node::Lt(a, b) => app("<", &[a, b], out),
        Node::Le(a, b) => app("<=", &[a, b], out),
        Node::Ite(c, a, b) => app("ite", &[c, a, b], out),
        Node::Forall(vs, body) => {
            let product = vs
                .iter()
                .try_fold(1u64, |acc, v| acc.checked_mul(pool.sort(*v).size()));
            let expand = match mode {
                QuantifierLowering::Native => false,
                QuantifierLowering::Expand => true,
                QuantifierLowering::Auto { threshold } => product.is_some_and(|p| p <= threshold),
            };
            if expand {
                write_term(pool, &expand_forall(pool, vs, body), mode, out);
            } else {
                out.push_str("(forall (");
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let sort = match pool.sort(*v) {
                        Sort::Bool => "Bool",
                        Sort::Int { .. } => "Int",
                    };
                    let _ = write!(out, "({} {})", pool.name(*v), sort);
                }
                out.push_str(") ");
                let guards: Vec<String> = vs
                    .iter()
                    .filter_map(|v| match pool.sort(*v) {
                        Sort::Int { lo, hi } => {
                            let n = pool.name(*v);
                            Some(format!("(<= {} {}) (<= {} {})", int(lo), n, n, int(hi)))
                        }
                        Sort::Bool => None,
                    })
                    .collect();
                if guards.is_empty() {
                    write_term(pool, body, mode, out);
                } else {
                    let _ = write!(out, "(=> (and {}) ", guards.join(" "));
                    write_term(pool, body, mode, out);
                    out.push(')');
                }
                out.push(')');
            }
        }
    }
}

/// Conjunction of `body` under every assignment of `vs` from their domains.
pub fn expand_forall(pool: &VarPool, vs: &[VarId], body: &Term) -> Term {
    let mut parts = Vec::new();
    let mut map = HashMap::new();
    expand_rec(pool, vs, body, &mut map, &mut parts);
    and(parts)
}

fn expand_rec(
    pool: &VarPool,
    vs: &[VarId],
    body: &Term,
    map: &mut HashMap<VarId, Term>,
    out: &mut Vec<Term>,
) {
    let Some((&v, rest)) = vs.split_first() else {
        out.push(substitute(body, map));
        return;
    };
    for val in pool.sort(v).values() {
        let c = match val {
            crate::formula::Value::Bool(b) => Term::bool(b),
            crate::formula::Value::Int(i) => Term::int(i),
        };
        map.insert(v, c);
        expand_rec(pool, rest, body, map, out);
    }
    map.remove(&v);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eq, forall, implies, lt, or, Term};

    #[test]
    fn prints_standard_syntax() {
        let mut p = VarPool::new();
        let x = p.int_var("tau", -1, 3);
        let b = p.bool_var("cut");
        let t = implies(b, lt(x.clone(), Term::int(-2)));
        assert_eq!(
            assertion(&p, &t, QuantifierLowering::Native),
            "(assert (=> v1_cut (< v0_tau (- 2))))"
        );
        assert_eq!(
            declare(&p, x.as_var().unwrap()),
            vec![
                "(declare-fun v0_tau () Int)".to_string(),
                "(assert (and (<= (- 1) v0_tau) (<= v0_tau 3)))".to_string()
            ]
        );
    }

    #[test]
    fn quantifiers_native_or_expanded() {
        let mut p = VarPool::new();
        let x = p.fresh("x", Sort::Int { lo: 0, hi: 2 });
        let y = p.int_var("y", 0, 5);
        let f = forall(
            vec![x],
            or([lt(Term::var(x), y.clone()), eq(Term::var(x), Term::int(0))]),
        );
        assert_eq!(
            term_to_string(&p, &f, QuantifierLowering::Native),
            "(forall ((v0_x Int)) (=> (and (<= 0 v0_x) (<= v0_x 2)) (or (< v0_x v1_y) (= v0_x 0))))"
        );
        assert_eq!(
            term_to_string(&p, &f, QuantifierLowering::default()),
            "(and (< 1 v1_y) (< 2 v1_y))"
        );
    }
}
