//! Solver-agnostic formulas over Booleans and bounded integers.
//!
//! Enumerated sorts (sugar choices, situations, rule indices) are bounded integers whose
//! range is part of the variable declaration. Constructors fold constants eagerly, so
//! formulas built against concrete data shrink to what actually needs solving.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    /// Integers in `lo..=hi`.
    Int {
        lo: i64,
        hi: i64,
    },
}

impl Sort {
    /// Number of values of the sort.
    pub fn size(self) -> u64 {
        match self {
            Sort::Bool => 2,
            Sort::Int { lo, hi } => (hi - lo + 1).max(0) as u64,
        }
    }

    pub fn values(self) -> Vec<Value> {
        match self {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int { lo, hi } => (lo..=hi).map(Value::Int).collect(),
        }
    }

    pub fn contains(self, v: Value) -> bool {
        match (self, v) {
            (Sort::Bool, Value::Bool(_)) => true,
            (Sort::Int { lo, hi }, Value::Int(i)) => lo <= i && i <= hi,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: Sort,
}

/// Allocates variables with unique, stable names `v<id>_<role>`.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    decls: Vec<VarDecl>,
}

impl VarPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, role: &str, sort: Sort) -> VarId {
        let id = VarId(self.decls.len() as u32);
        let role: String = role
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        self.decls.push(VarDecl {
            name: format!("v{}_{}", id.0, role),
            sort,
        });
        id
    }

    pub fn bool_var(&mut self, role: &str) -> Term {
        Term::var(self.fresh(role, Sort::Bool))
    }

    pub fn int_var(&mut self, role: &str, lo: i64, hi: i64) -> Term {
        Term::var(self.fresh(role, Sort::Int { lo, hi }))
    }

    pub fn decl(&self, v: VarId) -> &VarDecl {
        &self.decls[v.0 as usize]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.decls[v.0 as usize].name
    }

    pub fn sort(&self, v: VarId) -> Sort {
        self.decls[v.0 as usize].sort
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// `name<TAB>sort` lines for every variable, in allocation order.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            let sort = match d.sort {
                Sort::Bool => "Bool".to_string(),
                Sort::Int { lo, hi } => format!("Int[{lo},{hi}]"),
            };
            out.push_str(&format!("{}\t{}\n", d.name, sort));
        }
        out
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Bool(bool),
    Int(i64),
    Var(VarId),
    Not(Term),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Term, Term),
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    Ite(Term, Term, Term),
    Forall(Vec<VarId>, Term),
}

/// Shared, immutable formula node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term(Arc<Node>);

pub fn tt() -> Term {
    Term::bool(true)
}

pub fn ff() -> Term {
    Term::bool(false)
}

impl Term {
    fn mk(n: Node) -> Term {
        Term(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn bool(b: bool) -> Term {
        Term::mk(Node::Bool(b))
    }

    pub fn int(i: i64) -> Term {
        Term::mk(Node::Int(i))
    }

    pub fn var(v: VarId) -> Term {
        Term::mk(Node::Var(v))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self.0 {
            Node::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self.0 {
            Node::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<VarId> {
        match *self.0 {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_bool() == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.as_bool() == Some(false)
    }

    /// Free variables, in ascending id order.
    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        collect_free(self, &mut Vec::new(), &mut out, &mut seen);
        out
    }

    /// Number of distinct nodes in the term DAG.
    pub fn dag_size(&self) -> usize {
        fn go(t: &Term, seen: &mut std::collections::HashSet<*const Node>) {
            if !seen.insert(Arc::as_ptr(&t.0)) {
                return;
            }
            for c in children(t) {
                go(c, seen);
            }
        }
        let mut seen = std::collections::HashSet::new();
        go(self, &mut seen);
        seen.len()
    }
}

fn children(t: &Term) -> Vec<&Term> {
    match t.node() {
        Node::Bool(_) | Node::Int(_) | Node::Var(_) => vec![],
        Node::Not(a) | Node::Forall(_, a) => vec![a],
        Node::And(xs) | Node::Or(xs) => xs.iter().collect(),
        Node::Implies(a, b) | Node::Eq(a, b) | Node::Lt(a, b) | Node::Le(a, b) => vec![a, b],
        Node::Ite(c, a, b) => vec![c, a, b],
    }
}

fn collect_free(
    t: &Term,
    bound: &mut Vec<VarId>,
    out: &mut BTreeSet<VarId>,
    seen: &mut std::collections::HashSet<*const Node>,
) {
    if bound.is_empty() && !seen.insert(Arc::as_ptr(&t.0)) {
        return;
    }
    match t.node() {
        Node::Var(v) => {
            if !bound.contains(v) {
                out.insert(*v);
            }
        }
        Node::Forall(vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().copied());
            collect_free(body, bound, out, seen);
            bound.truncate(n);
        }
        _ => {
            for c in children(t) {
                collect_free(c, bound, out, seen);
            }
        }
    }
}

pub fn not(a: Term) -> Term {
    match a.node() {
        Node::Bool(b) => Term::bool(!b),
        Node::Not(inner) => inner.clone(),
        _ => Term::mk(Node::Not(a)),
    }
}

pub fn and(xs: impl IntoIterator<Item = Term>) -> Term {
    let mut out = Vec::new();
    for x in xs {
        match x.node() {
            Node::Bool(true) => {}
            Node::Bool(false) => return ff(),
            Node::And(inner) => out.extend(inner.iter().cloned()),
            _ => out.push(x),
        }
    }
    match out.len() {
        0 => tt(),
        1 => out.pop().unwrap(),
        _ => Term::mk(Node::And(out)),
    }
}

pub fn or(xs: impl IntoIterator<Item = Term>) -> Term {
    let mut out = Vec::new();
    for x in xs {
        match x.node() {
            Node::Bool(false) => {}
            Node::Bool(true) => return tt(),
            Node::Or(inner) => out.extend(inner.iter().cloned()),
            _ => out.push(x),
        }
    }
    match out.len() {
        0 => ff(),
        1 => out.pop().unwrap(),
        _ => Term::mk(Node::Or(out)),
    }
}

pub fn and2(a: Term, b: Term) -> Term {
    and([a, b])
}

pub fn or2(a: Term, b: Term) -> Term {
    or([a, b])
}

pub fn implies(a: Term, b: Term) -> Term {
    match (a.as_bool(), b.as_bool()) {
        (Some(false), _) | (_, Some(true)) => tt(),
        (Some(true), _) => b,
        (_, Some(false)) => not(a),
        _ => Term::mk(Node::Implies(a, b)),
    }
}

/// Equality on either sort; on Booleans this is `iff`.
pub fn eq(a: Term, b: Term) -> Term {
    if a == b {
        return tt();
    }
    match (a.node(), b.node()) {
        (Node::Int(x), Node::Int(y)) => Term::bool(x == y),
        (Node::Bool(x), Node::Bool(y)) => Term::bool(x == y),
        (Node::Bool(true), _) => b,
        (_, Node::Bool(true)) => a,
        (Node::Bool(false), _) => not(b),
        (_, Node::Bool(false)) => not(a),
        _ => Term::mk(Node::Eq(a, b)),
    }
}

pub fn neq(a: Term, b: Term) -> Term {
    not(eq(a, b))
}

pub fn lt(a: Term, b: Term) -> Term {
    if a == b {
        return ff();
    }
    match (a.as_int(), b.as_int()) {
        (Some(x), Some(y)) => Term::bool(x < y),
        _ => Term::mk(Node::Lt(a, b)),
    }
}

pub fn le(a: Term, b: Term) -> Term {
    if a == b {
        return tt();
    }
    match (a.as_int(), b.as_int()) {
        (Some(x), Some(y)) => Term::bool(x <= y),
        _ => Term::mk(Node::Le(a, b)),
    }
}

pub fn ite(c: Term, a: Term, b: Term) -> Term {
    match c.as_bool() {
        Some(true) => a,
        Some(false) => b,
        None if a == b => a,
        None => match (a.as_bool(), b.as_bool()) {
            (Some(true), Some(false)) => c,
            (Some(false), Some(true)) => not(c),
            (Some(true), _) => or2(c, b),
            (Some(false), _) => and2(not(c), b),
            (_, Some(true)) => or2(not(c), a),
            (_, Some(false)) => and2(c, a),
            _ => Term::mk(Node::Ite(c, a, b)),
        },
    }
}

/// At most one of `xs` holds (pairwise encoding).
pub fn at_most_one(xs: &[Term]) -> Term {
    let mut parts = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            parts.push(not(and2(xs[i].clone(), xs[j].clone())));
        }
    }
    and(parts)
}

pub fn exactly_one(xs: &[Term]) -> Term {
    and2(or(xs.iter().cloned()), at_most_one(xs))
}

/// Universal closure over `vars`; variables not occurring in `body` are dropped.
pub fn forall(vars: Vec<VarId>, body: Term) -> Term {
    let free = body.free_vars();
    let vars: Vec<VarId> = vars.into_iter().filter(|v| free.contains(v)).collect();
    if vars.is_empty() || body.as_bool().is_some() {
        return body;
    }
    Term::mk(Node::Forall(vars, body))
}

/// Lexicographic `xs ≤ ys` over integer vectors of equal length.
pub fn lex_le(xs: &[Term], ys: &[Term]) -> Term {
    assert_eq!(xs.len(), ys.len());
    let mut acc = tt();
    for i in (0..xs.len()).rev() {
        let here = or2(
            lt(xs[i].clone(), ys[i].clone()),
            and2(eq(xs[i].clone(), ys[i].clone()), acc),
        );
        acc = here;
    }
    acc
}

/// Replaces free occurrences of variables by terms, folding as it rebuilds.
pub fn substitute(t: &Term, map: &HashMap<VarId, Term>) -> Term {
    let mut memo = HashMap::new();
    subst_rec(t, map, &mut memo)
}

fn subst_rec(t: &Term, map: &HashMap<VarId, Term>, memo: &mut HashMap<*const Node, Term>) -> Term {
    let key = Arc::as_ptr(&t.0);
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    let r = match t.node() {
        Node::Bool(_) | Node::Int(_) => t.clone(),
        Node::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Node::Not(a) => not(subst_rec(a, map, memo)),
        Node::And(xs) => and(xs
            .iter()
            .map(|x| subst_rec(x, map, memo))
            .collect::<Vec<_>>()),
        Node::Or(xs) => or(xs
            .iter()
            .map(|x| subst_rec(x, map, memo))
            .collect::<Vec<_>>()),
        Node::Implies(a, b) => implies(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Eq(a, b) => eq(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Lt(a, b) => lt(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Le(a, b) => le(subst_rec(a, map, memo), subst_rec(b, map, memo)),
        Node::Ite(c, a, b) => ite(
            subst_rec(c, map, memo),
            subst_rec(a, map, memo),
            subst_rec(b, map, memo),
        ),
        Node::Forall(vs, body) => {
            let inner: HashMap<VarId, Term> = map
                .iter()
                .filter(|(k, _)| !vs.contains(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect();
            let mut inner_memo = HashMap::new();
            forall(vs.clone(), subst_rec(body, &inner, &mut inner_memo))
        }
    };
    memo.insert(key, r.clone());
    r
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable {0:?} has no value")]
    Unassigned(VarId),
    #[error("ill-sorted term")]
    Sort,
}

/// Evaluates `t` under `env`; quantifiers enumerate the declared domains in `pool`.
pub fn eval(t: &Term, env: &HashMap<VarId, Value>, pool: &VarPool) -> Result<Value, EvalError> {
    let b = |t: &Term, env: &HashMap<VarId, Value>| -> Result<bool, EvalError> {
        eval(t, env, pool)?.as_bool().ok_or(EvalError::Sort)
    };
    let i = |t: &Term, env: &HashMap<VarId, Value>| -> Result<i64, EvalError> {
        eval(t, env, pool)?.as_int().ok_or(EvalError::Sort)
    };
    Ok(match t.node() {
        Node::Bool(x) => Value::Bool(*x),
        Node::Int(x) => Value::Int(*x),
        Node::Var(v) => *env.get(v).ok_or(EvalError::Unassigned(*v))?,
        Node::Not(a) => Value::Bool(!b(a, env)?),
        Node::And(xs) => {
            for x in xs {
                if !b(x, env)? {
                    return Ok(Value::Bool(false));
                }
            }
            Value::Bool(true)
        }
        Node::Or(xs) => {
            for x in xs {
                if b(x, env)? {
                    return Ok(Value::Bool(true));
                }
            }
            Value::Bool(false)
        }
        Node::Implies(p, q) => Value::Bool(!b(p, env)? || b(q, env)?),
        Node::Eq(p, q) => Value::Bool(eval(p, env, pool)? == eval(q, env, pool)?),
        Node::Lt(p, q) => Value::Bool(i(p, env)? < i(q, env)?),
        Node::Le(p, q) => Value::Bool(i(p, env)? <= i(q, env)?),
        Node::Ite(c, p, q) => {
            if b(c, env)? {
                eval(p, env, pool)?
            } else {
                eval(q, env, pool)?
            }
        }
        Node::Forall(vs, body) => {
            let mut env = env.clone();
            Value::Bool(forall_holds(vs, body, &mut env, pool)?)
        }
    })
}

fn forall_holds(
    vs: &[VarId],
    body: &Term,
    env: &mut HashMap<VarId, Value>,
    pool: &VarPool,
) -> Result<bool, EvalError> {
    let Some((&v, rest)) = vs.split_first() else {
        return eval(body, env, pool)?.as_bool().ok_or(EvalError::Sort);
    };
    for val in pool.sort(v).values() {
        env.insert(v, val);
        if !forall_holds(rest, body, env, pool)? {
            return Ok(false);
        }
    }
    Ok(true)
}
