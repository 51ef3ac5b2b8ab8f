//! The production encoding: a formula over a molecule view and rule views that holds
//! exactly when the molecule can be assembled by the rules.

use glycan_core::Situation;
use glycan_smt::{
    and, and2, eq, ff, implies, le, lt, neq, not, or, or2, tt, Term, VarId, VarPool,
};

use crate::template::{kappa, MolView, RuleView};

/// Knobs shared by every production encoding of a job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    pub depth: usize,
    pub width: usize,
    pub compartments: u32,
    pub hard_ends: bool,
    pub fast_slow: bool,
}

impl EncodeOptions {
    /// Every node of a piece carries the piece's time and cut times are distinct, so
    /// time order is the application order. Needed when applicability depends on
    /// what is absent at application time.
    pub fn exact_time(&self) -> bool {
        self.hard_ends || self.fast_slow
    }
}

/// Per-node production variables of one encoding: whether a node roots an added
/// piece, which rule added it, when, and in which compartment.
#[derive(Clone, Debug)]
pub struct ProdVars {
    pub cut: Vec<Term>,
    pub rmatch: Vec<Term>,
    pub tau: Vec<Term>,
    pub comp: Vec<Term>,
}

impl ProdVars {
    pub fn fresh(
        pool: &mut VarPool,
        mol: &MolView,
        rules: usize,
        opts: &EncodeOptions,
        tag: &str,
    ) -> ProdVars {
        let n = mol.len();
        let mut pv = ProdVars {
            cut: Vec::with_capacity(n),
            rmatch: Vec::with_capacity(n),
            tau: Vec::with_capacity(n),
            comp: Vec::with_capacity(n),
        };
        for i in 0..n {
            if i == 0 {
                pv.cut.push(ff());
                pv.rmatch.push(Term::int(0));
                pv.tau.push(Term::int(0));
                pv.comp.push(Term::int(1));
                continue;
            }
            pv.cut.push(pool.bool_var(&format!("{tag}_n{i}_cut")));
            pv.rmatch.push(if rules > 1 {
                pool.int_var(&format!("{tag}_n{i}_rmatch"), 0, rules as i64 - 1)
            } else {
                Term::int(0)
            });
            pv.tau.push(pool.int_var(&format!("{tag}_n{i}_tau"), 0, n as i64));
            pv.comp.push(if opts.compartments > 1 {
                pool.int_var(&format!("{tag}_n{i}_comp"), 1, opts.compartments as i64)
            } else {
                Term::int(1)
            });
        }
        pv
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.cut
            .iter()
            .chain(&self.rmatch)
            .chain(&self.tau)
            .chain(&self.comp)
            .filter_map(|t| t.as_var())
            .collect()
    }
}

fn absent() -> Term {
    kappa(Situation::Absent)
}

struct Enc<'a> {
    mol: &'a MolView,
    rules: &'a [RuleView],
    opts: &'a EncodeOptions,
    pv: &'a ProdVars,
}

impl Enc<'_> {
    fn k(&self, t: usize, r: usize) -> Term {
        self.rules[t].nodes[r].kappa.clone()
    }

    fn nu(&self, t: usize, r: usize) -> Term {
        self.rules[t].nodes[r].nu.clone()
    }

    fn label(&self, u: usize) -> Term {
        self.mol.nodes[u].label.clone()
    }

    fn time_side(&self, t: usize, u: usize, mark: &Term, expand: bool) -> Vec<Term> {
        let compart = self.rules[t].compart.clone();
        let tau = self.pv.tau[u].clone();
        let comp = self.pv.comp[u].clone();
        let mut out = Vec::with_capacity(2);
        if expand {
            out.push(if self.opts.exact_time() {
                eq(tau, mark.clone())
            } else {
                le(mark.clone(), tau)
            });
            if self.opts.compartments > 1 {
                out.push(eq(compart, comp));
            }
        } else {
            out.push(lt(tau, mark.clone()));
            if self.opts.compartments > 1 {
                out.push(le(comp, compart));
            }
        }
        out
    }

    /// The rule subtree at `r` sits on the molecule subtree at `u`.
    fn match_tree(
        &self,
        u: Option<usize>,
        r: Option<usize>,
        t: usize,
        mark: &Term,
        expand: bool,
    ) -> Term {
        let Some(r) = r else { return tt() };
        let Some(u) = u else {
            return eq(self.k(t, r), absent());
        };
        let mut body = self.time_side(t, u, mark, expand);
        body.push(eq(self.nu(t, r), self.label(u)));
        for s in 1..=self.opts.width {
            body.push(self.match_tree(
                self.mol.child(u, s),
                self.rules[t].child(r, s),
                t,
                mark,
                expand,
            ));
        }
        let mut out = implies(neq(self.k(t, r), absent()), and(body));
        if !expand && self.opts.hard_ends {
            let he = self.rules[t].nodes[r].hard_end.clone();
            let later = implies(
                and2(he, self.mol.present(u)),
                le(mark.clone(), self.pv.tau[u].clone()),
            );
            out = and2(out, later);
        }
        out
    }

    /// Molecule nodes just past the expand part are exactly the cuts below it.
    fn match_cut(&self, u: Option<usize>, r: Option<usize>, t: usize, pp: Term) -> Term {
        let Some(u) = u else { return tt() };
        let cut = self.pv.cut[u].clone();
        let Some(r) = r else {
            return implies(and2(self.mol.present(u), pp), cut);
        };
        let mut body = vec![implies(pp, eq(eq(self.k(t, r), absent()), cut))];
        for s in 1..=self.opts.width {
            body.push(self.match_cut(
                self.mol.child(u, s),
                self.rules[t].child(r, s),
                t,
                neq(self.k(t, r), absent()),
            ));
        }
        implies(self.mol.present(u), and(body))
    }

    /// Walks the rule's ancestor path onto `anchor`'s ancestors along `path`, asserting
    /// the pattern, and returns the constraints with the rule node under the last slot.
    fn ancestor_walk(
        &self,
        anchor: usize,
        path: &[usize],
        t: usize,
        mark: &Term,
    ) -> (Vec<Term>, usize) {
        let mut parts = Vec::new();
        let mut r = self.rules[t].root();
        let mut u = anchor;
        for (j, &slot) in path.iter().enumerate() {
            parts.push(eq(self.k(t, r), kappa(Situation::MatchAns)));
            parts.push(eq(self.nu(t, r), self.label(u)));
            parts.extend(self.time_side(t, u, mark, false));
            for s in (1..=self.opts.width).filter(|&s| s != slot) {
                parts.push(self.match_tree(
                    self.mol.child(u, s),
                    self.rules[t].child(r, s),
                    t,
                    mark,
                    false,
                ));
            }
            r = self.rules[t].child(r, slot).expect("walk stays above the template depth");
            if j + 1 < path.len() {
                u = self.mol.child(u, slot).expect("path follows molecule structure");
            }
        }
        (parts, r)
    }

    /// Rule `t`, with its expand root at depth `l`, added the piece rooted at `v`.
    fn encode_p(&self, v: usize, t: usize, l: usize) -> Term {
        let Some(a) = self.mol.ancestor(v, l) else {
            return ff();
        };
        let path = self.mol.path_from_ancestor(v, l).expect("ancestor exists");
        let mark = self.pv.tau[v].clone();
        let (mut parts, r) = self.ancestor_walk(a, &path, t, &mark);
        parts.push(eq(self.k(t, r), kappa(Situation::Expand)));
        parts.push(self.match_tree(Some(v), Some(r), t, &mark, true));
        parts.push(self.match_cut(Some(v), Some(r), t, ff()));
        and(parts)
    }

    /// Rule `t` could have been applied in slot `j` of `u` in the state just before
    /// `mark`, with its expand root at depth `l`.
    fn applicable_before(&self, u: usize, j: usize, t: usize, l: usize, mark: &Term) -> Term {
        let Some(a) = self.mol.ancestor(u, l - 1) else {
            return ff();
        };
        let mut path = self.mol.path_from_ancestor(u, l - 1).expect("ancestor exists");
        path.push(j);
        let (mut parts, r) = self.ancestor_walk(a, &path, t, mark);
        parts.push(eq(self.k(t, r), kappa(Situation::Expand)));
        parts.push(match self.mol.child(u, j) {
            None => tt(),
            Some(c) => or2(
                not(self.mol.present(c)),
                le(mark.clone(), self.pv.tau[c].clone()),
            ),
        });
        and(parts)
    }

    /// A slow application at `v` requires that no fast rule of its compartment was
    /// applicable anywhere at that moment.
    fn dominance(&self, v: usize) -> Term {
        let n = self.rules.len();
        let slow = or((0..n).map(|t| {
            and2(
                eq(self.pv.rmatch[v].clone(), Term::int(t as i64)),
                not(self.rules[t].fast.clone()),
            )
        }));
        let mark = self.pv.tau[v].clone();
        let mut blocked = Vec::new();
        for t in 0..n {
            let guard = and2(
                self.rules[t].fast.clone(),
                eq(self.rules[t].compart.clone(), self.pv.comp[v].clone()),
            );
            if guard.is_false() {
                continue;
            }
            let mut sites = Vec::new();
            for u in 0..self.mol.len() {
                for j in 1..=self.opts.width {
                    for l in 1..self.opts.depth {
                        sites.push(self.applicable_before(u, j, t, l, &mark));
                    }
                }
            }
            blocked.push(implies(guard, not(or(sites))));
        }
        implies(and2(self.pv.cut[v].clone(), slow), and(blocked))
    }
}

/// `mol` can be assembled from its root by `rules`, witnessed by `pv`.
pub fn encode_produce_with(
    mol: &MolView,
    rules: &[RuleView],
    opts: &EncodeOptions,
    pv: &ProdVars,
) -> Term {
    let enc = Enc {
        mol,
        rules,
        opts,
        pv,
    };
    let mut parts = Vec::new();
    for s in 1..=opts.width {
        if let Some(c) = mol.child(0, s) {
            parts.push(implies(mol.present(c), pv.cut[c].clone()));
        }
    }
    for v in 1..mol.len() {
        parts.push(implies(pv.cut[v].clone(), mol.present(v)));
        for t in 0..rules.len() {
            let fired = and2(
                pv.cut[v].clone(),
                eq(pv.rmatch[v].clone(), Term::int(t as i64)),
            );
            let ways = or((1..opts.depth).map(|l| enc.encode_p(v, t, l)));
            parts.push(implies(fired, ways));
        }
        if opts.fast_slow {
            parts.push(enc.dominance(v));
        }
    }
    if opts.exact_time() {
        for a in 1..mol.len() {
            for b in a + 1..mol.len() {
                let both = and2(pv.cut[a].clone(), pv.cut[b].clone());
                parts.push(implies(
                    both.clone(),
                    neq(pv.tau[a].clone(), pv.tau[b].clone()),
                ));
                if opts.compartments > 1 {
                    for (x, y) in [(a, b), (b, a)] {
                        parts.push(implies(
                            and2(both.clone(), lt(pv.tau[x].clone(), pv.tau[y].clone())),
                            le(pv.comp[x].clone(), pv.comp[y].clone()),
                        ));
                    }
                }
            }
        }
    }
    and(parts)
}

/// Production encoding with fresh production variables tagged `tag`.
pub fn encode_produce(
    pool: &mut VarPool,
    mol: &MolView,
    rules: &[RuleView],
    opts: &EncodeOptions,
    tag: &str,
) -> (Term, ProdVars) {
    let pv = ProdVars::fresh(pool, mol, rules.len(), opts, tag);
    (encode_produce_with(mol, rules, opts, &pv), pv)
}
