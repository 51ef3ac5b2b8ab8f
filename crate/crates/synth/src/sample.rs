//! Random synthesis jobs whose observations come from a hidden rule set.

use glycan_core::sample::{random_alphabet, random_rule, RuleSampling};
use glycan_core::{closure, ClosureConfig, Dataset, Molecule, RuleSet, SugarId};
use rand::Rng;

use crate::job::SynthesisJob;

/// Knobs for [`sample_job`].
#[derive(Clone, Copy, Debug)]
pub struct JobSampling {
    pub max_sugars: usize,
    pub max_arity: usize,
    /// Rule depth in levels, used both for the hidden rules and the job budget.
    pub depth: usize,
    pub max_rules: usize,
    /// Closure height and molecule template height.
    pub height: usize,
    pub compartments: u32,
    /// Jobs whose closure is larger than this are discarded.
    pub max_molecules: usize,
}

impl JobSampling {
    pub fn tiny() -> Self {
        JobSampling {
            max_sugars: 2,
            max_arity: 2,
            depth: 2,
            max_rules: 2,
            height: 2,
            compartments: 1,
            max_molecules: 12,
        }
    }

    pub fn small() -> Self {
        JobSampling {
            max_sugars: 3,
            max_arity: 2,
            depth: 2,
            max_rules: 3,
            height: 3,
            compartments: 1,
            max_molecules: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampledJob {
    /// Budgets match the hidden rules, so the job is synthesizable.
    pub job: SynthesisJob,
    pub hidden: RuleSet,
}

/// Samples hidden rules, closes a single seed under them up to the height bound and
/// observes the maximal molecules. `None` when the closure is trivial or too large.
pub fn sample_job<R: Rng>(rng: &mut R, s: &JobSampling) -> Option<SampledJob> {
    let size = rng.gen_range(1..=s.max_sugars);
    let arity = rng.gen_range(1..=s.max_arity);
    let a = random_alphabet(rng, size, arity);
    let opts = RuleSampling {
        compartments: s.compartments,
        ..RuleSampling::plain(s.depth)
    };
    let want = rng.gen_range(1..=s.max_rules);
    let mut rules = Vec::new();
    for _ in 0..10 * want {
        if rules.len() == want {
            break;
        }
        if let Some(r) = random_rule(&a, rng, &opts) {
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
    }
    let hidden = RuleSet::new(rules, s.compartments).ok()?;
    let mut cfg = ClosureConfig::new(s.height);
    cfg.max_molecules = s.max_molecules;
    let seed = Molecule::single(&a, SugarId(0));
    let cl = closure(&a, &[seed], &hidden, &cfg).ok()?;
    if cl.len() < 2 {
        return None;
    }
    let all = cl.molecules();
    let maximal: Vec<Molecule> = all
        .iter()
        .filter(|m| !all.iter().any(|o| o != *m && m.is_rooted_prefix_of(o)))
        .cloned()
        .collect();
    let data = Dataset::new(a, maximal).ok()?;
    let mut job = SynthesisJob::new(data, hidden.rules().len(), s.depth, s.compartments);
    job.budgets.h = s.height;
    Some(SampledJob { job, hidden })
}
