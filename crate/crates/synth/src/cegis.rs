//! The counterexample-guided loop: propose rules that produce every observed molecule,
//! search for a producible molecule outside the data, reject it, repeat.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use glycan_core::{
    verify, ClosureError, Dataset, ModelError, Molecule, RuleSet,
};
use glycan_smt::{
    and, eq, forall, not, substitute, SatResult, Session, SmtError, Term, Value, VarId, VarPool,
};
use log::{debug, info, warn};

use crate::correctness::{molecule_template_correctness, rule_template_correctness, symmetry_break};
use crate::decode::{decode_molecule, decode_rules, transfer_witness, DecodeError};
use crate::encode::{encode_produce, EncodeOptions, ProdVars};
use crate::job::{
    CexSource, Counterexample, JobError, NegMode, QueryTiming, Status, SynthesisJob,
    SynthesisOutcome,
};
use crate::template::{make_rule_templates, MolView, RuleView, ShapeError, TemplateShape};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Job(#[from] JobError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("decoding a solver model failed")]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("decoded rules are invalid")]
    Model(#[from] ModelError),
    #[error("oracle failed")]
    Closure(#[from] ClosureError),
}

pub(crate) fn options(job: &SynthesisJob) -> EncodeOptions {
    EncodeOptions {
        depth: job.budgets.d,
        width: job.budgets.w,
        compartments: job.budgets.k,
        hard_ends: job.variants.hard_ends,
        fast_slow: job.variants.fast_slow,
    }
}

/// The candidate side of the problem: templates, their correctness, and production of
/// every observed molecule.
struct SynthesisQuery {
    pool: VarPool,
    templates: Vec<RuleView>,
    template_vars: Vec<VarId>,
    session: Session,
}

impl SynthesisQuery {
    fn open(job: &SynthesisJob) -> Result<Self, SynthError> {
        let b = &job.budgets;
        let data = &job.dataset;
        let opts = options(job);
        let shape = TemplateShape {
            depth: b.d,
            width: b.w,
            compartments: b.k,
            hard_ends: job.variants.hard_ends,
            fast_slow: job.variants.fast_slow,
        };
        let mut pool = VarPool::new();
        let templates = make_rule_templates(&mut pool, data.alphabet(), &shape, b.n);
        let template_vars = templates.iter().flat_map(|t| t.vars()).collect();
        let mut session = Session::open(job.solver.clone())?;
        session.assert(&pool, &rule_template_correctness(data.alphabet(), &templates, b.d))?;
        if job.symmetry_breaking {
            session.assert(&pool, &symmetry_break(&templates))?;
        }
        for (i, m) in data.molecules().iter().enumerate() {
            let view = MolView::from_molecule(m, b.w)?;
            let (f, _) = encode_produce(&mut pool, &view, &templates, &opts, &format!("p{i}"));
            session.assert(&pool, &f)?;
        }
        Ok(SynthesisQuery {
            pool,
            templates,
            template_vars,
            session,
        })
    }
}

/// Runs only the first synthesis query and reports its answer and solve time.
pub fn probe_synthesis_query(job: &SynthesisJob) -> Result<(SatResult, Duration), SynthError> {
    job.validate()?;
    let mut q = SynthesisQuery::open(job)?;
    let t0 = Instant::now();
    let ans = q.session.check()?;
    Ok((ans, t0.elapsed()))
}

fn value_term(v: Value) -> Term {
    match v {
        Value::Bool(b) => Term::bool(b),
        Value::Int(i) => Term::int(i),
    }
}

pub fn synthesize(job: &SynthesisJob) -> Result<SynthesisOutcome, SynthError> {
    let start = Instant::now();
    job.validate()?;
    let mut out = if job.budgets.n == 0 {
        empty_rules(job)?
    } else {
        Loop::new(job)?.run()?
    };
    out.elapsed = start.elapsed();
    info!(
        "{} after {} iterations in {:?}",
        out.status.as_str(),
        out.iterations,
        out.elapsed
    );
    Ok(out)
}

fn empty_rules(job: &SynthesisJob) -> Result<SynthesisOutcome, SynthError> {
    let rs = RuleSet::new(Vec::new(), job.budgets.k)?;
    let report = verify(&rs, &job.dataset, &job.closure_config())?;
    let mut out = if report.passed() {
        let mut o = SynthesisOutcome::new(Status::Synthesized);
        o.rules = Some(rs);
        o
    } else {
        SynthesisOutcome::new(Status::NoRulesInBudget)
    };
    out.verification = Some(report);
    Ok(out)
}

struct Loop<'a> {
    job: &'a SynthesisJob,
    opts: EncodeOptions,
    q: SynthesisQuery,
    cex: Session,
    mhat: MolView,
    mhat_pv: ProdVars,
    cex_vars: Vec<VarId>,
    seen: HashSet<Molecule>,
    out: SynthesisOutcome,
    start: Instant,
}

impl<'a> Loop<'a> {
    fn new(job: &'a SynthesisJob) -> Result<Self, SynthError> {
        let start = Instant::now();
        let opts = options(job);
        let mut q = SynthesisQuery::open(job)?;
        let mut cex = Session::open(job.solver.clone())?;
        let mhat = MolView::template(&mut q.pool, job.dataset.alphabet(), job.budgets.h, job.budgets.w);
        let mcons = molecule_template_correctness(&mhat, &job.dataset, job.variants.repeats);
        cex.assert(&q.pool, &mcons)?;
        let (rcons, mhat_pv) = encode_produce(&mut q.pool, &mhat, &q.templates, &opts, "c");
        cex.assert(&q.pool, &rcons)?;
        let mut cex_vars = mhat.label_vars();
        cex_vars.extend(mhat_pv.vars());
        debug!("constraints built in {:?}", start.elapsed());
        Ok(Loop {
            job,
            opts,
            q,
            cex,
            mhat,
            mhat_pv,
            cex_vars,
            seen: HashSet::new(),
            out: SynthesisOutcome::new(Status::Inconclusive),
            start,
        })
    }

    fn timed(
        &mut self,
        which: &'static str,
        iteration: usize,
    ) -> Result<SatResult, SmtError> {
        let t0 = Instant::now();
        let ans = if which == "synth" {
            self.q.session.check_labeled(iteration, which)?
        } else {
            self.cex.check_labeled(iteration, which)?
        };
        let answer = match &ans {
            SatResult::Sat => "sat".to_string(),
            SatResult::Unsat => "unsat".to_string(),
            SatResult::Unknown(why) => format!("unknown ({why})"),
        };
        debug!("iteration {iteration} {which}: {answer} in {:?}", t0.elapsed());
        self.out.timings.push(QueryTiming {
            iteration,
            kind: which,
            elapsed: t0.elapsed(),
            answer,
        });
        Ok(ans)
    }

    fn finish(mut self, status: Status, note: Option<String>) -> SynthesisOutcome {
        self.out.status = status;
        self.out.note = note;
        self.out
    }

    fn run(mut self) -> Result<SynthesisOutcome, SynthError> {
        let alphabet = self.job.dataset.alphabet().clone();
        let limits = self.job.limits;
        loop {
            if self.out.iterations >= limits.max_iterations {
                let note = format!("iteration limit {} reached", limits.max_iterations);
                return Ok(self.finish(Status::Inconclusive, Some(note)));
            }
            if self.start.elapsed() > limits.wall_clock {
                let note = format!("wall clock limit {:?} reached", limits.wall_clock);
                return Ok(self.finish(Status::Inconclusive, Some(note)));
            }
            self.out.iterations += 1;
            let iter = self.out.iterations;
            match self.timed("synth", iter)? {
                SatResult::Sat => {}
                SatResult::Unsat => return Ok(self.finish(Status::NoRulesInBudget, None)),
                SatResult::Unknown(why) => {
                    let note = format!("synthesis query unknown: {why}");
                    return Ok(self.finish(Status::Inconclusive, Some(note)));
                }
            }
            let model = self.q.session.get_values(&self.q.pool, &self.q.template_vars)?;
            let rules = decode_rules(&model, &alphabet, &self.q.templates)?;
            let candidate = RuleSet::new(rules.clone(), self.job.budgets.k)?;
            self.out.last_candidate = Some(candidate.clone());

            self.cex.push()?;
            let fix = and(self
                .q
                .template_vars
                .iter()
                .map(|&v| {
                    let val = model.get(v).ok_or(DecodeError::MissingValue)?;
                    Ok(eq(Term::var(v), value_term(val)))
                })
                .collect::<Result<Vec<_>, DecodeError>>()?);
            self.cex.assert(&self.q.pool, &fix)?;
            let ans = self.timed("cex", iter)?;
            match ans {
                SatResult::Sat => {
                    let cm = self.cex.get_values(&self.q.pool, &self.cex_vars)?;
                    self.cex.pop()?;
                    let (m, _) = decode_molecule(&cm, &alphabet, &self.mhat)?;
                    let view = MolView::from_molecule(&m, self.job.budgets.w)?;
                    let (f, pv) = encode_produce(
                        &mut self.q.pool,
                        &view,
                        &self.q.templates,
                        &self.opts,
                        &format!("n{iter}"),
                    );
                    let witness = transfer_witness(&cm, &self.mhat, &self.mhat_pv, &view, &pv);
                    self.reject(iter, m, rules, CexSource::Solver, f, pv, Some(witness))?;
                }
                SatResult::Unsat => {
                    self.cex.pop()?;
                    let report = verify(&candidate, &self.job.dataset, &self.job.closure_config())?;
                    if report.passed() {
                        self.out.rules = Some(candidate);
                        self.out.verification = Some(report);
                        return Ok(self.finish(Status::Synthesized, None));
                    }
                    if !report.missing.is_empty() {
                        self.out.verification = Some(report);
                        let note = "the oracle does not produce every observed molecule from \
                                    the candidate"
                            .to_string();
                        return Ok(self.finish(Status::Inconclusive, Some(note)));
                    }
                    let m = report
                        .extras
                        .iter()
                        .min_by_key(|m| m.len())
                        .expect("failed report without missing has extras")
                        .clone();
                    warn!("counterexample query missed an oracle extra; rejecting it directly");
                    let view = MolView::from_molecule(&m, self.job.budgets.w)?;
                    let (f, pv) = encode_produce(
                        &mut self.q.pool,
                        &view,
                        &self.q.templates,
                        &self.opts,
                        &format!("n{iter}"),
                    );
                    self.reject(iter, m, rules, CexSource::Oracle, f, pv, None)?;
                }
                SatResult::Unknown(why) => {
                    self.cex.pop()?;
                    warn!("counterexample query unknown ({why}); stopping without a verdict");
                    self.out.verification = Some(verify(
                        &candidate,
                        &self.job.dataset,
                        &self.job.closure_config(),
                    )?);
                    let note = format!("counterexample query unknown: {why}");
                    return Ok(self.finish(Status::Inconclusive, Some(note)));
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn reject(
        &mut self,
        iteration: usize,
        m: Molecule,
        candidate: Vec<glycan_core::Rule>,
        source: CexSource,
        produce: Term,
        pv: ProdVars,
        witness: Option<std::collections::HashMap<VarId, Term>>,
    ) -> Result<(), SynthError> {
        if !self.seen.insert(m.clone()) {
            warn!("counterexample repeated at iteration {iteration}");
        }
        let neg = not(produce);
        let quantified = self.job.neg_mode == NegMode::Quantified || witness.is_none();
        if quantified {
            self.q
                .session
                .assert(&self.q.pool, &forall(pv.vars(), neg.clone()))?;
        }
        if let Some(w) = witness {
            self.q.session.assert(&self.q.pool, &substitute(&neg, &w))?;
        }
        self.out.counterexamples.push(Counterexample {
            iteration,
            molecule: m,
            candidate,
            source,
        });
        Ok(())
    }
}

/// Solver-independent facts about a finished run, checked against the oracle.
pub fn counterexample_is_valid(data: &Dataset, c: &Counterexample, job: &SynthesisJob) -> bool {
    let Ok(rs) = RuleSet::new(c.candidate.clone(), job.budgets.k) else {
        return false;
    };
    let Ok(cl) = glycan_core::closure(data.alphabet(), &data.seeds(), &rs, &job.closure_config())
    else {
        return false;
    };
    cl.contains(&c.molecule)
        && !glycan_core::accepted_by_any(&c.molecule, data.molecules(), job.variants.repeats)
}
