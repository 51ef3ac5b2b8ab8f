//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use glycan_core::sample::{random_alphabet, random_rule, RuleSampling};
use glycan_core::{
    closure, parse_dataset, parse_molecule, parse_rules_with, verify, ClosureConfig, Dataset,
    Molecule, MonomerAlphabet, RepeatConfig, Rule, RuleSet, SugarId,
};
use glycan_smt::{replay, SatResult, SolverConfig};
use glycan_synth::{
    brute_force_synth, counterexample_is_valid, probe_synthesis_query, sample_job, synthesize,
    EncodeOptions, JobSampling, NegMode, ProduceChecker, Status, SynthesisJob, SynthesisOutcome,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_glycansynth");

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> Dataset {
    parse_dataset(&std::fs::read_to_string(data_path(name)).unwrap()).unwrap()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Counterexamples seen across all runs, for criterion 6.
#[derive(Default)]
struct CexTally {
    total: usize,
    invalid: Vec<String>,
}

impl CexTally {
    fn record(&mut self, job: &SynthesisJob, out: &SynthesisOutcome) {
        for c in &out.counterexamples {
            self.total += 1;
            if !counterexample_is_valid(&job.dataset, c, job) {
                self.invalid.push(glycan_core::molecule_to_string(
                    job.dataset.alphabet(),
                    &c.molecule,
                ));
            }
        }
    }
}

fn run_cli(args: &[&str]) -> (Option<i32>, String, Duration) {
    let t0 = Instant::now();
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    (out.status.code(), stderr, t0.elapsed())
}

fn report_field(report: &str, key: &str) -> Option<usize> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("# {key}: ")))
        .and_then(|v| v.trim().parse().ok())
}

fn criterion_1(tmp: &Path) -> Verdict {
    let report = tmp.join("c1_report.txt");
    let data = data_path("motivating.gly");
    let (code, stderr, took) = run_cli(&[
        "synth",
        data.to_str().unwrap(),
        "--rules",
        "7",
        "--depth",
        "3",
        "--compartments",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    if code != Some(0) {
        return verdict(false, format!("exit {code:?}: {}", stderr.trim()));
    }
    let text = std::fs::read_to_string(&report).unwrap();
    let d = load("motivating.gly");
    let rules = parse_rules_with(&text, d.alphabet()).unwrap().rules;
    let rs = RuleSet::new(rules, 1).unwrap();
    let passed = verify(&rs, &d, &ClosureConfig::new(4)).unwrap().passed();
    let iters = report_field(&text, "iterations").unwrap_or(usize::MAX);
    verdict(
        passed && iters <= 30 && took <= Duration::from_secs(60) && rs.len() <= 7,
        format!(
            "{} rules, verify at h=4 {}, {iters} iterations, {} ms",
            rs.len(),
            if passed { "passes" } else { "fails" },
            took.as_millis()
        ),
    )
}

fn criterion_2() -> Verdict {
    let data = data_path("motivating.gly");
    let (code, stderr, took) = run_cli(&[
        "synth",
        data.to_str().unwrap(),
        "--rules",
        "6",
        "--depth",
        "2",
        "--compartments",
        "2",
    ]);
    verdict(
        code == Some(2) && took <= Duration::from_secs(60),
        format!("exit {code:?} in {} ms ({})", took.as_millis(), stderr.trim()),
    )
}

/// Canonical texts of every molecule rooted at `root` with height at most `h`.
fn all_texts(a: &MonomerAlphabet, root: SugarId, h: usize) -> Vec<String> {
    let name = a.name(root).to_string();
    let arity = a.arity(root);
    if arity == 0 {
        return vec![name];
    }
    let mut options = vec!["_".to_string()];
    if h > 0 {
        for s in a.ids() {
            options.extend(all_texts(a, s, h - 1));
        }
    }
    let mut out = Vec::new();
    let mut idx = vec![0; arity];
    loop {
        if idx.iter().all(|&i| i == 0) {
            out.push(name.clone());
        } else {
            let parts: Vec<&str> = idx.iter().map(|&i| options[i].as_str()).collect();
            out.push(format!("{name}({})", parts.join(", ")));
        }
        let Some(p) = (0..arity).rev().find(|&p| idx[p] + 1 < options.len()) else { break };
        idx[p] += 1;
        for q in p + 1..arity {
            idx[q] = 0;
        }
    }
    out
}

fn count_molecules(a: &MonomerAlphabet, root: SugarId, h: usize) -> u128 {
    let below: u128 = if h == 0 {
        0
    } else {
        a.ids().map(|s| count_molecules(a, s, h - 1)).sum()
    };
    (0..a.arity(root)).fold(1u128, |acc, _| acc.saturating_mul(1 + below))
}

/// Every one-node extension of `m` that stays within height `h`.
fn extensions(a: &MonomerAlphabet, m: &Molecule, h: usize) -> Vec<Molecule> {
    let mut out = Vec::new();
    for v in m.node_ids() {
        if m.depth(v) >= h {
            continue;
        }
        for slot in 1..=m.arity(v) {
            if m.child(v, slot).is_some() {
                continue;
            }
            for s in a.ids() {
                let mut t = m.tree().clone();
                t.add_child(a, v, slot, s).unwrap();
                out.push(Molecule::new(t));
            }
        }
    }
    out
}

const EXHAUSTIVE_CAP: u128 = 400;

fn criterion_3() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut instances, mut checks, mut exhaustive) = (0, 0usize, 0);
    let mut attempts = 0;
    while instances < 500 {
        attempts += 1;
        if attempts > 5000 {
            return verdict(false, format!("only {instances} usable instances"));
        }
        let size = rng.gen_range(1..=3);
        let arity = rng.gen_range(1..=2);
        let a = random_alphabet(&mut rng, size, arity);
        let variant = instances % 4;
        let sampling = RuleSampling {
            depth: 2,
            fill: 0.6,
            hard_end_prob: if variant == 1 { 0.3 } else { 0.0 },
            compartments: if variant == 2 { 2 } else { 1 },
            fast_prob: if variant == 3 { 0.5 } else { 0.0 },
        };
        let n = rng.gen_range(1..=3);
        let rules: Vec<Rule> = (0..20)
            .filter_map(|_| random_rule(&a, &mut rng, &sampling))
            .take(n)
            .collect();
        if rules.is_empty() {
            continue;
        }
        let k = rules.iter().map(Rule::compartment).max().unwrap().max(sampling.compartments);
        let opts = EncodeOptions {
            depth: 2,
            width: a.max_arity(),
            compartments: k,
            hard_ends: variant == 1,
            fast_slow: variant == 3,
        };
        let mut cfg = ClosureConfig::new(3);
        cfg.fast_slow = opts.fast_slow;
        cfg.max_molecules = 5000;
        let seeds: Vec<Molecule> = a.ids().map(|s| Molecule::single(&a, s)).collect();
        let rs = RuleSet::new(rules.clone(), k).unwrap();
        let Ok(cl) = closure(&a, &seeds, &rs, &cfg) else { continue };
        let total: u128 = a.ids().map(|s| count_molecules(&a, s, 3)).sum();
        let mut mols: Vec<Molecule> = Vec::new();
        if total <= EXHAUSTIVE_CAP {
            exhaustive += 1;
            for s in a.ids() {
                mols.extend(all_texts(&a, s, 3).iter().map(|t| parse_molecule(&a, t).unwrap()));
            }
        } else {
            let mut seen = HashSet::new();
            for s in a.ids() {
                for t in all_texts(&a, s, 1) {
                    let m = parse_molecule(&a, &t).unwrap();
                    if seen.insert(m.clone()) {
                        mols.push(m);
                    }
                }
            }
            for m in cl.molecules() {
                for x in std::iter::once(m.clone()).chain(extensions(&a, m, 3)) {
                    if seen.insert(x.clone()) {
                        mols.push(x);
                    }
                }
            }
        }
        let mut checker = ProduceChecker::new(SolverConfig::from_env(), opts).unwrap();
        for m in &mols {
            let got = checker.produces(m, &rules).unwrap() == SatResult::Sat;
            if got != cl.contains(m) {
                return verdict(
                    false,
                    format!(
                        "instance {instances}: {} encoder {got}, oracle {}",
                        glycan_core::molecule_to_string(&a, m),
                        !got
                    ),
                );
            }
            checks += 1;
        }
        instances += 1;
    }
    let took = t0.elapsed();
    verdict(
        took <= Duration::from_secs(600),
        format!(
            "{instances} instances ({exhaustive} exhaustive over height 3), {checks} molecule checks, all agree, {} s",
            took.as_secs()
        ),
    )
}

fn with_solver(mut job: SynthesisJob) -> SynthesisJob {
    job.solver = SolverConfig::from_env();
    job.limits.wall_clock = Duration::from_secs(60);
    job
}

fn criterion_4(tally: &mut CexTally) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut jobs, mut synthesized, mut unsound) = (0, 0, Vec::new());
    let mut statuses = BTreeMap::new();
    while jobs < 100 {
        let Some(s) = sample_job(&mut rng, &JobSampling::small()) else { continue };
        let job = with_solver(s.job);
        let out = synthesize(&job).unwrap();
        tally.record(&job, &out);
        *statuses.entry(out.status.as_str()).or_insert(0) += 1;
        if out.status == Status::Synthesized {
            synthesized += 1;
            let rs = out.rules.as_ref().unwrap();
            let report = verify(rs, &job.dataset, &job.closure_config()).unwrap();
            if !report.extras.is_empty() || !report.missing.is_empty() {
                unsound.push(jobs);
            }
        }
        jobs += 1;
    }
    verdict(
        unsound.is_empty(),
        format!("{jobs} jobs {statuses:?}, {synthesized} verified, unsound {unsound:?}"),
    )
}

fn criterion_5(tally: &mut CexTally) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut jobs, mut agree, mut inconclusive) = (0, 0, 0);
    let mut disagreements = Vec::new();
    while jobs < 200 {
        let Some(s) = sample_job(&mut rng, &JobSampling::tiny()) else { continue };
        let mut job = with_solver(s.job);
        // Half the jobs get one rule fewer than the hidden set.
        if jobs % 2 == 1 {
            job.budgets.n -= 1;
        }
        let Ok(brute) = brute_force_synth(&job) else { continue };
        let out = synthesize(&job).unwrap();
        tally.record(&job, &out);
        jobs += 1;
        if out.status == Status::Inconclusive {
            inconclusive += 1;
        } else if out.status == brute.status {
            agree += 1;
        } else {
            disagreements.push(jobs - 1);
        }
    }
    let decided = jobs - inconclusive;
    verdict(
        disagreements.is_empty() && inconclusive * 20 < jobs,
        format!(
            "{agree}/{decided} decided jobs agree, {inconclusive} inconclusive, disagreements {disagreements:?}"
        ),
    )
}

fn criterion_6(tally: &mut CexTally) -> Verdict {
    let job = with_solver(SynthesisJob::new(load("motivating.gly"), 7, 3, 1));
    let out = synthesize(&job).unwrap();
    tally.record(&job, &out);
    // Deeper, wider budgets than the hidden rules leave room for wrong candidates.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut jobs = 0;
    while jobs < 40 {
        let Some(s) = sample_job(&mut rng, &JobSampling::small()) else { continue };
        let mut j = with_solver(s.job);
        j.budgets.d = 3;
        j.budgets.h += 1;
        j.budgets.n += 1;
        let o = synthesize(&j).unwrap();
        tally.record(&j, &o);
        jobs += 1;
    }
    for (n, mode) in [(6, NegMode::Quantified), (7, NegMode::InstantiateOnly), (8, NegMode::Quantified)] {
        let mut j = with_solver(SynthesisJob::new(load("motivating.gly"), n, 3, 1));
        j.neg_mode = mode;
        let o = synthesize(&j).unwrap();
        tally.record(&j, &o);
    }
    let first_extra = out.iterations <= 1 || out.counterexamples.iter().any(|c| c.iteration == 1);
    verdict(
        tally.invalid.is_empty() && first_extra,
        format!(
            "{} counterexamples checked, {} invalid {:?}; motivating job extra after iteration 1: {first_extra}",
            tally.total,
            tally.invalid.len(),
            tally.invalid
        ),
    )
}

fn criterion_7() -> Verdict {
    let t0 = Instant::now();
    let run = |name: &str, n, d, k, h, edit: &dyn Fn(&mut SynthesisJob)| {
        let mut job = with_solver(SynthesisJob::new(load(name), n, d, k));
        job.budgets.h = h;
        edit(&mut job);
        synthesize(&job).unwrap().status
    };
    let none = |_: &mut SynthesisJob| {};
    let a2 = run("compartments.gly", 2, 2, 2, 2, &none);
    let a1 = run("compartments.gly", 2, 2, 1, 2, &none);
    let rc = RepeatConfig { d0: 1, r0: 2 };
    let b_on = run("repeat_chain.gly", 3, 2, 1, 4, &|j| j.variants.repeats = Some(rc));
    let b_off = run("repeat_chain.gly", 3, 2, 1, 4, &none);
    let c_on = run("hard_ends.gly", 2, 2, 1, 1, &|j| j.variants.hard_ends = true);
    let c_off = run("hard_ends.gly", 2, 2, 1, 1, &none);
    let ok = a2 == Status::Synthesized
        && a1 == Status::NoRulesInBudget
        && b_on == Status::Synthesized
        && b_off != Status::Synthesized
        && c_on == Status::Synthesized
        && c_off == Status::NoRulesInBudget
        && t0.elapsed() <= Duration::from_secs(360);
    verdict(
        ok,
        format!(
            "compartments k=2 {} k=1 {}; repeats on {} off {}; hard ends on {} off {}; {} ms",
            a2.as_str(),
            a1.as_str(),
            b_on.as_str(),
            b_off.as_str(),
            c_on.as_str(),
            c_off.as_str(),
            t0.elapsed().as_millis()
        ),
    )
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut jobs, mut mismatched) = (0, Vec::new());
    let (mut with, mut without) = (Vec::new(), Vec::new());
    while jobs < 50 {
        let Some(s) = sample_job(&mut rng, &JobSampling::small()) else { continue };
        let mut job = with_solver(s.job);
        // Vary the budget so that both answers occur.
        job.budgets.n = rng.gen_range(1..=job.budgets.n + 1);
        job.symmetry_breaking = true;
        let (on, t_on) = probe_synthesis_query(&job).unwrap();
        job.symmetry_breaking = false;
        let (off, t_off) = probe_synthesis_query(&job).unwrap();
        if on != off {
            mismatched.push(jobs);
        }
        with.push(t_on);
        without.push(t_off);
        jobs += 1;
    }
    let (m_on, m_off) = (median(with), median(without));
    verdict(
        mismatched.is_empty(),
        format!(
            "{jobs} jobs, status mismatches {mismatched:?}; median solve {} us with breaking, {} us without{}",
            m_on.as_micros(),
            m_off.as_micros(),
            if m_on <= m_off { "" } else { " (soft target missed)" }
        ),
    )
}

fn dump(tmp: &Path, tag: &str, args: &[&str]) -> BTreeMap<String, Vec<u8>> {
    let dir = tmp.join(tag);
    let mut full: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap().to_string();
    full.extend(["--dump-smt", &d]);
    let (code, stderr, _) = run_cli(&full);
    assert!(matches!(code, Some(0) | Some(2)), "{stderr}");
    std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

fn criterion_9(tmp: &Path) -> Verdict {
    let motivating = data_path("motivating.gly");
    let chain = data_path("repeat_chain.gly");
    let jobs: Vec<Vec<&str>> = vec![
        vec!["synth", motivating.to_str().unwrap(), "--rules", "7", "--depth", "3"],
        vec!["synth", motivating.to_str().unwrap(), "--rules", "6", "--depth", "2", "--compartments", "2"],
        vec![
            "synth", chain.to_str().unwrap(), "--rules", "3", "--depth", "2", "--height", "4",
            "--repeats", "1", "2",
        ],
    ];
    let (mut files, mut replayed) = (0, 0);
    for (i, args) in jobs.iter().enumerate() {
        let first = dump(tmp, &format!("c9_{i}_a"), args);
        let second = dump(tmp, &format!("c9_{i}_b"), args);
        if first != second {
            return verdict(false, format!("job {i}: transcripts differ between runs"));
        }
        let answers = String::from_utf8(first["answers.txt"].clone()).unwrap();
        for line in answers.lines() {
            let (file, expected) = line.split_once(' ').unwrap();
            let script = String::from_utf8(first[file].clone()).unwrap();
            let got = replay(&SolverConfig::from_env(), &script).unwrap();
            let got = match got.last() {
                Some(SatResult::Sat) => "sat",
                Some(SatResult::Unsat) => "unsat",
                _ => "unknown",
            };
            if !expected.starts_with(got) {
                return verdict(false, format!("job {i}: {file} replayed {got}, recorded {expected}"));
            }
            replayed += 1;
        }
        files += first.len();
    }
    verdict(
        true,
        format!("{} jobs dumped twice, {files} files byte-identical, {replayed} queries replay to the recorded answers", jobs.len()),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        // Nothing to list for the test runner; the suite is a single program.
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let mut tally = CexTally::default();
    let mut results: Vec<(usize, Verdict)> = Vec::new();
    let mut report = |n: usize, v: Verdict| {
        println!("criterion {n}: {} ({})", if v.pass { "pass" } else { "FAIL" }, v.detail);
        results.push((n, v));
    };
    report(1, criterion_1(tmp.path()));
    report(2, criterion_2());
    report(3, criterion_3());
    let c4 = criterion_4(&mut tally);
    report(4, c4);
    let c5 = criterion_5(&mut tally);
    report(5, c5);
    report(6, criterion_6(&mut tally));
    report(7, criterion_7());
    report(8, criterion_8());
    report(9, criterion_9(tmp.path()));
    let failed: Vec<usize> = results.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
