//! Rule synthesis for glycan assembly: constraint templates, the production encoding,
//! the counterexample-guided loop and an exhaustive cross-check.

pub mod brute;
pub mod cegis;
pub mod check;
pub mod correctness;
pub mod decode;
pub mod encode;
pub mod job;
pub mod report;
pub mod sample;
pub mod template;

pub use brute::{brute_force_synth, enumerate_rules, BruteError};
pub use cegis::{counterexample_is_valid, probe_synthesis_query, synthesize, SynthError};
pub use check::ProduceChecker;
pub use encode::{encode_produce, EncodeOptions, ProdVars};
pub use job::{
    Budgets, CexSource, Counterexample, Limits, NegMode, Status, SynthesisJob, SynthesisOutcome,
    Variants,
};
pub use report::outcome_to_text;
pub use sample::{sample_job, JobSampling, SampledJob};
pub use template::{MolView, RuleView};
