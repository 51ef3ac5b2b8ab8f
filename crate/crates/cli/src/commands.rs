use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use glycan_core::dot::{molecule_to_dot, rule_to_dot};
use glycan_core::{
    closure, parse_dataset, parse_document, parse_rules_with, ClosureConfig, Dataset, Molecule,
    MonomerAlphabet, RepeatConfig, Rule, RuleSet,
};
use glycan_smt::SolverConfig;
use glycan_synth::{outcome_to_text, synthesize, NegMode, Status, SynthesisJob};
use log::info;

use crate::output::{emit, read, write_atomic};
use crate::{EnumArgs, Mode, Semantics, SynthArgs, VerifyArgs, EXIT_INCONCLUSIVE, EXIT_NO};

fn load_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Rules over `alphabet`; a rule file may repeat its `sugar` lines but not add monomers.
fn load_rules(path: &Path, alphabet: &MonomerAlphabet) -> Result<Vec<Rule>> {
    let rf = parse_rules_with(&read(path)?, alphabet)
        .with_context(|| format!("parsing {}", path.display()))?;
    if rf.alphabet.len() != alphabet.len() {
        bail!(
            "{} declares monomers that are not in the alphabet",
            path.display()
        );
    }
    Ok(rf.rules)
}

fn rule_set(rules: Vec<Rule>, k: Option<u32>) -> Result<RuleSet> {
    let used = rules.iter().map(Rule::compartment).max().unwrap_or(1);
    let k = k.unwrap_or(used);
    if k == 0 {
        bail!("at least one compartment is required");
    }
    Ok(RuleSet::new(rules, k)?)
}

fn closure_config(height: usize, s: &Semantics) -> Result<ClosureConfig> {
    let mut cfg = ClosureConfig::new(height);
    cfg.fast_slow = s.fast_slow;
    cfg.repeats = repeats(s);
    if let Some(rc) = cfg.repeats {
        rc.check_fits(height)?;
    }
    Ok(cfg)
}

fn repeats(s: &Semantics) -> Option<RepeatConfig> {
    s.repeats.as_ref().map(|v| RepeatConfig { d0: v[0], r0: v[1] })
}

fn write_dot(dir: &Path, name: &str, text: &str) -> Result<()> {
    write_atomic(&dir.join(format!("{name}.dot")), text)
}

pub fn synth(a: SynthArgs) -> Result<u8> {
    let data = load_dataset(&a.dataset)?;
    let mut job = SynthesisJob::new(data, a.rules, a.depth, a.compartments);
    if let Some(w) = a.width {
        job.budgets.w = w;
    }
    if let Some(h) = a.height {
        job.budgets.h = h;
    }
    job.variants.fast_slow = a.semantics.fast_slow;
    job.variants.repeats = repeats(&a.semantics);
    job.variants.hard_ends = a.hard_ends;
    job.neg_mode = match a.mode {
        Mode::Quantified => NegMode::Quantified,
        Mode::InstantiateOnly => NegMode::InstantiateOnly,
    };
    job.symmetry_breaking = !a.no_symmetry_breaking;
    job.solver = SolverConfig {
        executable: a.solver,
        timeout: Duration::from_millis(a.timeout),
        dump_dir: a.dump_smt,
        ..SolverConfig::default()
    };
    job.limits.max_iterations = a.max_iters;
    job.validate()?;

    let out = synthesize(&job)?;
    emit(a.report.as_deref(), &outcome_to_text(&job, &out))?;
    if let Some(dir) = &job.solver.dump_dir {
        // One line per dumped query, in the order the solver answered them.
        let answers: String = out
            .timings
            .iter()
            .map(|t| format!("query_{}_{}.smt2 {}\n", t.iteration, t.kind, t.answer))
            .collect();
        write_atomic(&dir.join("answers.txt"), &answers)?;
    }
    let alphabet = job.dataset.alphabet();
    if let Some(dir) = &a.dot {
        if let Some(rs) = out.rules.as_ref().or(out.last_candidate.as_ref()) {
            for (i, r) in rs.rules().iter().enumerate() {
                write_dot(dir, &format!("rule_{i}"), &rule_to_dot(alphabet, r, &format!("rule {i}")))?;
            }
        }
        for (i, c) in out.counterexamples.iter().enumerate() {
            let name = format!("counterexample {i} (iteration {})", c.iteration);
            write_dot(dir, &format!("counterexample_{i}"), &molecule_to_dot(alphabet, &c.molecule, &name))?;
        }
    }
    let rules = out.rules.as_ref().map_or(0, RuleSet::len);
    eprintln!(
        "{}: {rules} rules after {} iterations in {} ms",
        out.status.as_str(),
        out.iterations,
        out.elapsed.as_millis()
    );
    Ok(match out.status {
        Status::Synthesized => 0,
        Status::NoRulesInBudget => EXIT_NO,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

pub fn verify(a: VerifyArgs) -> Result<u8> {
    let data = load_dataset(&a.dataset)?;
    let rs = rule_set(load_rules(&a.rules, data.alphabet())?, a.compartments)?;
    let tallest = data.max_height();
    let height = a.height.unwrap_or(tallest);
    if height < tallest {
        bail!("height {height} is below the tallest observed molecule ({tallest})");
    }
    let cfg = closure_config(height, &a.semantics)?;
    let report = glycan_core::verify(&rs, &data, &cfg)?;
    emit(a.report.as_deref(), &report.to_text(&data))?;
    if let Some(dir) = &a.dot {
        for (i, m) in report.extras.iter().enumerate() {
            write_dot(dir, &format!("extra_{i}"), &molecule_to_dot(data.alphabet(), m, &format!("extra {i}")))?;
        }
    }
    info!("closure of {} molecules", report.closure_size);
    Ok(if report.passed() { 0 } else { EXIT_NO })
}

pub fn enumerate(a: EnumArgs) -> Result<u8> {
    let alphabet = parse_document(&read(&a.alphabet)?, &MonomerAlphabet::new())
        .with_context(|| format!("parsing {}", a.alphabet.display()))?
        .alphabet;
    if alphabet.is_empty() {
        bail!("{} declares no monomers", a.alphabet.display());
    }
    let rs = rule_set(load_rules(&a.rules, &alphabet)?, a.compartments)?;
    let cfg = closure_config(a.height, &a.semantics)?;
    let seeds: Vec<Molecule> = alphabet.ids().map(|s| Molecule::single(&alphabet, s)).collect();
    let cl = closure(&alphabet, &seeds, &rs, &cfg)?;
    let mut text = cl.sorted_texts(&alphabet).join("\n");
    text.push('\n');
    emit(None, &text)?;
    Ok(0)
}
