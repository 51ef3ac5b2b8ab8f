//! Plain-text rendering of a synthesis outcome.

use std::fmt::Write;

use glycan_core::{molecule_to_string, rules_to_string, Dataset};

use crate::job::{CexSource, SynthesisJob, SynthesisOutcome};

/// Rules in rule-file grammar (comment lines for everything else), a stats block and
/// the counterexample log. The result parses as a rule file.
pub fn outcome_to_text(job: &SynthesisJob, out: &SynthesisOutcome) -> String {
    let data: &Dataset = &job.dataset;
    let a = data.alphabet();
    let b = &job.budgets;
    let mut s = String::new();
    let _ = writeln!(s, "# status: {}", out.status.as_str());
    let _ = writeln!(
        s,
        "# budgets: rules={} depth={} width={} height={} compartments={}",
        b.n, b.d, b.w, b.h, b.k
    );
    let _ = writeln!(s, "# iterations: {}", out.iterations);
    let _ = writeln!(s, "# counterexamples: {}", out.counterexamples.len());
    let _ = writeln!(s, "# elapsed_ms: {}", out.elapsed.as_millis());
    let synth_ms: u128 = out
        .timings
        .iter()
        .filter(|t| t.kind == "synth")
        .map(|t| t.elapsed.as_millis())
        .sum();
    let cex_ms: u128 = out
        .timings
        .iter()
        .filter(|t| t.kind == "cex")
        .map(|t| t.elapsed.as_millis())
        .sum();
    let _ = writeln!(s, "# solver_ms: synth={synth_ms} cex={cex_ms}");
    if let Some(note) = &out.note {
        let _ = writeln!(s, "# note: {note}");
    }
    match (&out.rules, &out.last_candidate) {
        (Some(rs), _) => s.push_str(&rules_to_string(a, rs.rules())),
        (None, Some(rs)) => {
            let _ = writeln!(s, "# last candidate (not accepted):");
            for line in rules_to_string(a, rs.rules()).lines() {
                let _ = writeln!(s, "# {line}");
            }
        }
        (None, None) => {}
    }
    if !out.counterexamples.is_empty() {
        let _ = writeln!(s, "# counterexample log:");
        for c in &out.counterexamples {
            let src = match c.source {
                CexSource::Solver => "solver",
                CexSource::Oracle => "oracle",
            };
            let _ = writeln!(
                s,
                "#   iteration {} ({src}): {}",
                c.iteration,
                molecule_to_string(a, &c.molecule)
            );
        }
    }
    if let Some(v) = &out.verification {
        let _ = writeln!(s, "# verification:");
        for line in v.to_key_values(data).lines() {
            let _ = writeln!(s, "#   {line}");
        }
    }
    s
}
