//! Synthesis jobs and their outcomes.

use std::time::Duration;

use glycan_core::{Dataset, Molecule, RepeatConfig, Rule, RuleSet, VerificationReport};
use glycan_smt::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Number of rules.
    pub n: usize,
    /// Maximum rule depth.
    pub d: usize,
    /// Template width; at least the largest arity.
    pub w: usize,
    /// Molecule template height; at least the tallest observed molecule.
    pub h: usize,
    /// Number of compartments.
    pub k: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Variants {
    pub fast_slow: bool,
    pub repeats: Option<RepeatConfig>,
    pub hard_ends: bool,
}

/// How a rejected counterexample constrains later candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NegMode {
    /// Universally quantified non-production plus its instantiation at the witness.
    #[default]
    Quantified,
    /// Only the instantiation at the witness.
    InstantiateOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_iterations: usize,
    pub wall_clock: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: 1000,
            wall_clock: Duration::from_secs(600),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisJob {
    pub dataset: Dataset,
    pub budgets: Budgets,
    pub variants: Variants,
    pub neg_mode: NegMode,
    pub symmetry_breaking: bool,
    pub solver: SolverConfig,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JobError {
    #[error("rule depth must be at least 2, got {0}")]
    Depth(usize),
    #[error("width {width} is below the largest arity {arity}")]
    Width { width: usize, arity: usize },
    #[error("height {height} is below the tallest observed molecule ({tallest})")]
    Height { height: usize, tallest: usize },
    #[error("at least one compartment is required")]
    Compartments,
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error(transparent)]
    Repeats(#[from] glycan_core::accept::RepeatFitError),
}

impl SynthesisJob {
    /// Job with width and height taken from the dataset and default settings elsewhere.
    pub fn new(dataset: Dataset, n: usize, d: usize, k: u32) -> Self {
        let budgets = Budgets {
            n,
            d,
            w: dataset.alphabet().max_arity().max(1),
            h: dataset.max_height(),
            k,
        };
        SynthesisJob {
            dataset,
            budgets,
            variants: Variants::default(),
            neg_mode: NegMode::default(),
            symmetry_breaking: true,
            solver: SolverConfig::default(),
            limits: Limits::default(),
        }
    }

    pub fn validate(&self) -> Result<(), JobError> {
        let b = &self.budgets;
        if b.d < 2 {
            return Err(JobError::Depth(b.d));
        }
        if b.w == 0 {
            return Err(JobError::ZeroWidth);
        }
        let arity = self.dataset.alphabet().max_arity();
        if b.w < arity {
            return Err(JobError::Width { width: b.w, arity });
        }
        let tallest = self.dataset.max_height();
        if b.h < tallest {
            return Err(JobError::Height {
                height: b.h,
                tallest,
            });
        }
        if b.k == 0 {
            return Err(JobError::Compartments);
        }
        if let Some(rc) = self.variants.repeats {
            rc.check_fits(b.h)?;
        }
        Ok(())
    }

    /// Oracle settings matching the job's semantics.
    pub fn closure_config(&self) -> glycan_core::ClosureConfig {
        let mut cfg = glycan_core::ClosureConfig::new(self.budgets.h);
        cfg.repeats = self.variants.repeats;
        cfg.fast_slow = self.variants.fast_slow;
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Synthesized,
    NoRulesInBudget,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Synthesized => "synthesized",
            Status::NoRulesInBudget => "no-rules-in-budget",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CexSource {
    /// Found by the counterexample query.
    Solver,
    /// Found by the oracle after the counterexample query came back empty.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub iteration: usize,
    pub molecule: Molecule,
    /// The candidate rules that produce it.
    pub candidate: Vec<Rule>,
    pub source: CexSource,
}

#[derive(Clone, Debug)]
pub struct QueryTiming {
    pub iteration: usize,
    pub kind: &'static str,
    pub elapsed: Duration,
    pub answer: String,
}

#[derive(Clone, Debug)]
pub struct SynthesisOutcome {
    pub status: Status,
    /// Set exactly when the status is `Synthesized`.
    pub rules: Option<RuleSet>,
    pub last_candidate: Option<RuleSet>,
    pub iterations: usize,
    pub counterexamples: Vec<Counterexample>,
    pub timings: Vec<QueryTiming>,
    pub verification: Option<VerificationReport>,
    pub note: Option<String>,
    pub elapsed: Duration,
}

impl SynthesisOutcome {
    pub(crate) fn new(status: Status) -> Self {
        SynthesisOutcome {
            status,
            rules: None,
            last_candidate: None,
            iterations: 0,
            counterexamples: Vec::new(),
            timings: Vec::new(),
            verification: None,
            note: None,
            elapsed: Duration::ZERO,
        }
    }
}
