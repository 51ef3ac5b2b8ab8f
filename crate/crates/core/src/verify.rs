use std::fmt::Write;

use crate::accept::accepted_by_any;
use crate::alphabet::MonomerAlphabet;
use crate::dataset::Dataset;
use crate::produce::{closure, Closure, ClosureConfig, ClosureError};
use crate::rule::RuleSet;
use crate::text::molecule_to_string;
use crate::tree::Molecule;

/// One application on the first-found derivation of a molecule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub stage: u32,
    pub rule: usize,
    pub result: Molecule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub seed: Molecule,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    fn from_closure(cl: &Closure, i: usize) -> Self {
        let chain = cl.derivation(i);
        let seed = cl.molecules()[chain[0].0].clone();
        let steps = chain
            .iter()
            .filter_map(|&(j, step)| {
                step.map(|s| DerivationStep {
                    stage: s.stage,
                    rule: s.rule,
                    result: cl.molecules()[j].clone(),
                })
            })
            .collect();
        Derivation { seed, steps }
    }

    pub fn to_text(&self, alphabet: &MonomerAlphabet) -> String {
        let mut out = molecule_to_string(alphabet, &self.seed);
        for s in &self.steps {
            let _ = write!(
                out,
                " -[c{} r{}]-> {}",
                s.stage,
                s.rule + 1,
                molecule_to_string(alphabet, &s.result)
            );
        }
        out
    }
}

/// Result of checking a rule set against a dataset up to a height bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Indices into the dataset of observed molecules that were produced.
    pub covered: Vec<usize>,
    pub missing: Vec<usize>,
    /// Produced molecules that are not acceptable intermediates of any observed molecule.
    pub extras: Vec<Molecule>,
    pub closure_size: usize,
    pub pruned: usize,
    pub covered_witnesses: Vec<Derivation>,
    pub extra_witnesses: Vec<Derivation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extras.is_empty()
    }

    pub fn to_text(&self, data: &Dataset) -> String {
        let a = data.alphabet();
        let mut out = String::new();
        let status = if self.passed() { "pass" } else { "fail" };
        let _ = writeln!(out, "verification: {status}");
        let _ = writeln!(
            out,
            "closure: {} molecules ({} pruned over the height bound)",
            self.closure_size, self.pruned
        );
        let _ = writeln!(
            out,
            "covered: {}/{}",
            self.covered.len(),
            data.molecules().len()
        );
        for &i in &self.missing {
            let _ = writeln!(out, "  missing {}", molecule_to_string(a, &data.molecules()[i]));
        }
        let _ = writeln!(out, "extras: {}", self.extras.len());
        for d in &self.extra_witnesses {
            let _ = writeln!(out, "  {}", d.to_text(a));
        }
        if !self.covered_witnesses.is_empty() {
            let _ = writeln!(out, "derivations:");
            for d in &self.covered_witnesses {
                let _ = writeln!(out, "  {}", d.to_text(a));
            }
        }
        out
    }

    /// `key=value` lines for scripts.
    pub fn to_key_values(&self, data: &Dataset) -> String {
        let a = data.alphabet();
        let mut out = String::new();
        let _ = writeln!(out, "status={}", if self.passed() { "pass" } else { "fail" });
        let _ = writeln!(out, "observed={}", data.molecules().len());
        let _ = writeln!(out, "covered={}", self.covered.len());
        let _ = writeln!(out, "missing={}", self.missing.len());
        let _ = writeln!(out, "extras={}", self.extras.len());
        let _ = writeln!(out, "closure_size={}", self.closure_size);
        let _ = writeln!(out, "pruned={}", self.pruned);
        for (n, &i) in self.missing.iter().enumerate() {
            let _ = writeln!(out, "missing.{n}={}", molecule_to_string(a, &data.molecules()[i]));
        }
        for (n, m) in self.extras.iter().enumerate() {
            let _ = writeln!(out, "extra.{n}={}", molecule_to_string(a, m));
        }
        out
    }
}

/// Enumerates the closure of the dataset's root seeds and compares it with the observed set.
pub fn verify(
    rs: &RuleSet,
    data: &Dataset,
    cfg: &ClosureConfig,
) -> Result<VerificationReport, ClosureError> {
    let cl = closure(data.alphabet(), &data.seeds(), rs, cfg)?;
    let mut report = VerificationReport {
        covered: Vec::new(),
        missing: Vec::new(),
        extras: Vec::new(),
        closure_size: cl.len(),
        pruned: cl.pruned(),
        covered_witnesses: Vec::new(),
        extra_witnesses: Vec::new(),
    };
    for (i, m) in data.molecules().iter().enumerate() {
        match cl.position(m) {
            Some(j) => {
                report.covered.push(i);
                report.covered_witnesses.push(Derivation::from_closure(&cl, j));
            }
            None => report.missing.push(i),
        }
    }
    for (j, m) in cl.molecules().iter().enumerate() {
        if !accepted_by_any(m, data.molecules(), cfg.repeats) {
            report.extras.push(m.clone());
            report.extra_witnesses.push(Derivation::from_closure(&cl, j));
        }
    }
    Ok(report)
}
