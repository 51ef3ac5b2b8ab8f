use glycan_core::{verify, Dataset};
use glycan_smt::SolverConfig;
use glycan_synth::{
    brute_force_synth, counterexample_is_valid, sample_job, synthesize, JobSampling, NegMode,
    Status, SynthesisJob,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny_jobs(seed: u64, count: usize) -> Vec<SynthesisJob> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        if let Some(s) = sample_job(&mut rng, &JobSampling::tiny()) {
            let mut job = s.job;
            job.solver = SolverConfig::from_env();
            // Every other job gets one rule fewer than the hidden set.
            if out.len() % 2 == 1 {
                job.budgets.n -= 1;
            }
            out.push(job);
        }
    }
    out
}

fn passes(job: &SynthesisJob, data: &Dataset) -> bool {
    let out = synthesize(job).unwrap();
    let rules = out.rules.as_ref().expect("rules on success");
    verify(rules, data, &job.closure_config()).unwrap().passed()
}

#[test]
fn cegis_agrees_with_brute_force_on_tiny_jobs() {
    let mut agreed = 0;
    for (i, job) in tiny_jobs(5, 24).iter().enumerate() {
        let brute = brute_force_synth(job).unwrap();
        let cegis = synthesize(job).unwrap();
        if cegis.status == Status::Inconclusive {
            continue;
        }
        assert_eq!(cegis.status, brute.status, "job {i}");
        for c in &cegis.counterexamples {
            assert!(counterexample_is_valid(&job.dataset, c, job), "job {i}");
        }
        if cegis.status == Status::Synthesized {
            assert!(passes(job, &job.dataset));
        }
        agreed += 1;
    }
    assert!(agreed >= 22);
}

#[test]
fn hidden_budget_is_always_synthesizable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 8 {
        let Some(s) = sample_job(&mut rng, &JobSampling::small()) else { continue };
        let mut job = s.job;
        job.solver = SolverConfig::from_env();
        let out = synthesize(&job).unwrap();
        assert_ne!(out.status, Status::NoRulesInBudget);
        if out.status == Status::Synthesized {
            let report = verify(out.rules.as_ref().unwrap(), &job.dataset, &job.closure_config());
            assert!(report.unwrap().extras.is_empty());
        }
        done += 1;
    }
}

#[test]
fn negation_modes_agree() {
    for job in tiny_jobs(17, 10) {
        let q = synthesize(&job).unwrap();
        let mut inst = job.clone();
        inst.neg_mode = NegMode::InstantiateOnly;
        let i = synthesize(&inst).unwrap();
        if q.status != Status::Inconclusive && i.status != Status::Inconclusive {
            assert_eq!(q.status, i.status);
        }
    }
}

#[test]
fn query_transcripts_are_deterministic() {
    let job = &tiny_jobs(23, 1)[0];
    let dump = |dir: &std::path::Path| {
        let mut j = job.clone();
        j.solver.dump_dir = Some(dir.to_path_buf());
        synthesize(&j).unwrap();
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| (p.file_name().unwrap().to_owned(), std::fs::read(&p).unwrap()))
            .collect::<Vec<_>>()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = dump(a.path());
    assert!(!first.is_empty());
    assert_eq!(first, dump(b.path()));
}
