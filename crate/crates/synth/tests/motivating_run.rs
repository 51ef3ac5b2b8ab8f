use glycan_core::parse_dataset;
use glycan_synth::{synthesize, Status, SynthesisJob};

#[test]
fn motivating_budget_synthesizes() {
    let data = parse_dataset(include_str!("../../../data/motivating.gly")).unwrap();
    let job = SynthesisJob::new(data, 7, 3, 1);
    let out = synthesize(&job).unwrap();
    eprintln!("{}", glycan_synth::outcome_to_text(&job, &out));
    assert_eq!(out.status, Status::Synthesized);
}

#[test]
fn smaller_budget_has_no_rules() {
    let data = parse_dataset(include_str!("../../../data/motivating.gly")).unwrap();
    let job = SynthesisJob::new(data, 6, 2, 2);
    let out = synthesize(&job).unwrap();
    eprintln!("{}", glycan_synth::outcome_to_text(&job, &out));
    assert_eq!(out.status, Status::NoRulesInBudget);
}
