use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Duration;

use glycan_smt::{
    and, eq, eval, forall, implies, le, lt, not, or, replay, tt, QuantifierLowering, SatResult,
    Session, SmtError, SolverConfig, Sort, Term, Value, VarId, VarPool,
};
use proptest::prelude::*;

fn open() -> Session {
    Session::open(SolverConfig::from_env()).expect("solver available")
}

#[test]
fn trivial_and_contradictory_queries() {
    let mut s = open();
    let mut pool = VarPool::new();
    s.assert(&pool, &tt()).unwrap();
    assert_eq!(s.check().unwrap(), SatResult::Sat);
    let x = pool.int_var("x", 0, 3);
    s.push().unwrap();
    s.assert(&pool, &lt(Term::int(3), x.clone())).unwrap();
    assert_eq!(s.check().unwrap(), SatResult::Unsat);
    s.pop().unwrap();
    s.assert(&pool, &le(Term::int(3), x.clone())).unwrap();
    assert_eq!(s.check().unwrap(), SatResult::Sat);
    let m = s.get_values(&pool, &[x.as_var().unwrap()]).unwrap();
    assert_eq!(m.int(x.as_var().unwrap()), Some(3));
    s.close();
}

#[test]
fn declarations_are_scoped() {
    let mut s = open();
    let mut pool = VarPool::new();
    let b = pool.bool_var("b");
    s.push().unwrap();
    s.assert(&pool, &b).unwrap();
    assert_eq!(s.check().unwrap(), SatResult::Sat);
    s.pop().unwrap();
    s.assert(&pool, &not(b.clone())).unwrap();
    assert_eq!(s.check().unwrap(), SatResult::Sat);
    let m = s.get_values(&pool, &[b.as_var().unwrap()]).unwrap();
    assert_eq!(m.bool(b.as_var().unwrap()), Some(false));
    assert!(s.transcript().contains("(declare-fun v0_b () Bool)"));
}

#[test]
fn transcripts_replay_to_the_same_answer() {
    let mut s = open();
    let mut pool = VarPool::new();
    let x = pool.int_var("x", 0, 5);
    let y = pool.int_var("y", 0, 5);
    s.assert(&pool, &lt(x.clone(), y.clone())).unwrap();
    s.push().unwrap();
    s.assert(&pool, &eq(y.clone(), Term::int(0))).unwrap();
    let text = s.transcript();
    assert_eq!(s.check().unwrap(), SatResult::Unsat);
    assert_eq!(replay(s.config(), &text).unwrap(), vec![SatResult::Unsat]);
}

#[test]
fn missing_binary_names_the_path() {
    let cfg = SolverConfig {
        executable: PathBuf::from("/nonexistent/solver-binary"),
        ..SolverConfig::default()
    };
    let err = Session::open(cfg).err().expect("launch fails");
    assert!(matches!(err, SmtError::Launch { .. }));
    assert!(err.to_string().contains("/nonexistent/solver-binary"));
}

#[test]
fn timeouts_surface_as_unknown() {
    let cfg = SolverConfig {
        timeout: Duration::from_millis(200),
        ..SolverConfig::from_env()
    };
    let mut s = Session::open(cfg).unwrap();
    let mut pool = VarPool::new();
    // Pigeonhole: 9 pigeons into 8 holes, hard for plain search.
    let n = 9;
    let holes = 8;
    let vars: Vec<Vec<Term>> = (0..n)
        .map(|i| {
            (0..holes)
                .map(|j| pool.bool_var(&format!("p{i}_{j}")))
                .collect()
        })
        .collect();
    let mut parts = Vec::new();
    for row in &vars {
        parts.push(or(row.iter().cloned()));
    }
    for j in 0..holes {
        for a in 0..n {
            for b in a + 1..n {
                parts.push(not(and([vars[a][j].clone(), vars[b][j].clone()])));
            }
        }
    }
    s.assert(&pool, &and(parts)).unwrap();
    match s.check().unwrap() {
        SatResult::Unknown(reason) => {
            assert!(reason.contains("timeout"));
            assert!(!s.is_alive());
        }
        SatResult::Unsat => {}
        SatResult::Sat => panic!("pigeonhole is unsatisfiable"),
    }
}

fn random_term(
    pool: &VarPool,
    free: &[VarId],
    bound: &[VarId],
    choices: &mut impl Iterator<Item = u8>,
    depth: u32,
) -> Term {
    let mut pick = || choices.next().unwrap_or(0);
    let vars: Vec<VarId> = free.iter().chain(bound).copied().collect();
    let atom = |k: u8, pick: &mut dyn FnMut() -> u8| {
        let v = vars[pick() as usize % vars.len()];
        match pool.sort(v) {
            Sort::Bool => Term::var(v),
            Sort::Int { lo, hi } => {
                let c = lo + (pick() as i64 % (hi - lo + 1));
                match k % 3 {
                    0 => eq(Term::var(v), Term::int(c)),
                    1 => lt(Term::var(v), Term::int(c)),
                    _ => {
                        let w = vars[pick() as usize % vars.len()];
                        if matches!(pool.sort(w), Sort::Int { .. }) {
                            le(Term::var(v), Term::var(w))
                        } else {
                            Term::var(w)
                        }
                    }
                }
            }
        }
    };
    let k = pick();
    if depth == 0 || k % 4 == 0 {
        return atom(pick(), &mut pick);
    }
    let a = random_term(pool, free, bound, choices, depth - 1);
    let b = random_term(pool, free, bound, choices, depth - 1);
    match k % 4 {
        1 => and([a, b]),
        2 => or([a, not(b)]),
        _ => implies(a, b),
    }
}

fn truth_table_sat(pool: &VarPool, t: &Term, free: &[VarId]) -> bool {
    fn go(pool: &VarPool, t: &Term, free: &[VarId], env: &mut HashMap<VarId, Value>) -> bool {
        let Some((&v, rest)) = free.split_first() else {
            return eval(t, env, pool).unwrap() == Value::Bool(true);
        };
        pool.sort(v).values().into_iter().any(|val| {
            env.insert(v, val);
            go(pool, t, rest, env)
        })
    }
    go(pool, t, free, &mut HashMap::new())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantifier_lowerings_agree_with_truth_tables(bytes in proptest::collection::vec(any::<u8>(), 64)) {
        let mut pool = VarPool::new();
        let x = pool.fresh("x", Sort::Int { lo: 0, hi: 2 });
        let y = pool.fresh("y", Sort::Int { lo: -1, hi: 1 });
        let p = pool.fresh("p", Sort::Bool);
        let q = pool.fresh("q", Sort::Int { lo: 0, hi: 3 });
        let r = pool.fresh("r", Sort::Bool);
        let mut it = bytes.into_iter();
        let body = random_term(&pool, &[x, y, p], &[q, r], &mut it, 3);
        let outer = random_term(&pool, &[x, y, p], &[], &mut it, 2);
        let t = and([outer, forall(vec![q, r], body)]);
        let want = truth_table_sat(&pool, &t, &[x, y, p]);
        for mode in [QuantifierLowering::Native, QuantifierLowering::Expand] {
            let cfg = SolverConfig { quantifiers: mode, ..SolverConfig::from_env() };
            let mut s = Session::open(cfg).unwrap();
            s.assert(&pool, &t).unwrap();
            let got = s.check().unwrap();
            prop_assert_eq!(got == SatResult::Sat, want, "{:?}", mode);
            if want {
                let m = s.get_values(&pool, &[x, y, p]).unwrap();
                let env: HashMap<VarId, Value> = [x, y, p]
                    .iter()
                    .map(|v| (*v, m.get(*v).unwrap_or_else(|| pool.sort(*v).values()[0])))
                    .collect();
                prop_assert_eq!(eval(&t, &env, &pool).unwrap(), Value::Bool(true));
            }
            s.close();
        }
    }
}
