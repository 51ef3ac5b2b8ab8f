use glycan_core::{
    apply, closure, molecule_to_string, parse_dataset, parse_molecule, parse_rules_with,
    verify, ClosureConfig, Dataset, Molecule, RuleSet,
};

fn dataset() -> Dataset {
    parse_dataset(include_str!("../../../data/motivating.gly")).unwrap()
}

fn rules(text: &str, d: &Dataset) -> RuleSet {
    RuleSet::from_rules(parse_rules_with(text, d.alphabet()).unwrap().rules)
}

fn mol(d: &Dataset, s: &str) -> Molecule {
    parse_molecule(d.alphabet(), s).unwrap()
}

#[test]
fn dataset_heights() {
    let d = dataset();
    let heights: Vec<_> = d.molecules().iter().map(|m| m.height()).collect();
    assert_eq!(heights, vec![2, 4, 3]);
    assert_eq!(d.max_height(), 4);
}

#[test]
fn ancestor_in_the_tallest_molecule() {
    let d = dataset();
    let m = &d.molecules()[1];
    let deepest_left_d = m.descend(m.root(), &[1, 1, 1, 1]).unwrap();
    assert_eq!(d.alphabet().name(m.label(deepest_left_d)), "D");
    let up2 = m.ancestor(deepest_left_d, 2).unwrap();
    assert_eq!(up2, m.descend(m.root(), &[1, 1]).unwrap());
    assert_eq!(d.alphabet().name(m.label(up2)), "B");
    let up3 = m.ancestor(deepest_left_d, 3).unwrap();
    assert_eq!(d.alphabet().name(m.label(up3)), "C");
}

#[test]
fn rooted_prefix_examples() {
    let d = dataset();
    let a = mol(&d, "A");
    assert!(d.molecules().iter().all(|o| a.is_rooted_prefix_of(o)));
    let bad = mol(&d, "A(C(B), D)");
    assert!(!d.accepts_prefix(&bad));
    assert!(mol(&d, "A(C(D), _)").is_rooted_prefix_of(&d.molecules()[0]));
}

#[test]
fn final_rules_produce_exactly_the_observed_set() {
    let d = dataset();
    let rs = rules(include_str!("../../../data/motivating_rules.gly"), &d);
    let report = verify(&rs, &d, &ClosureConfig::new(4)).unwrap();
    assert!(report.passed(), "{}", report.to_text(&d));
    assert_eq!(report.covered, vec![0, 1, 2]);
    let cl = closure(d.alphabet(), &d.seeds(), &rs, &ClosureConfig::new(4)).unwrap();
    assert!(!cl.contains(&mol(&d, "A(C(B), D)")));
    assert!(cl.molecules().iter().all(|m| d.accepts_prefix(m)));
}

#[test]
fn first_guess_overproduces() {
    let d = dataset();
    let rs = rules(include_str!("../../../data/motivating_first_guess.gly"), &d);
    let report = verify(&rs, &d, &ClosureConfig::new(4)).unwrap();
    assert!(!report.passed());
    assert!(!report.extras.is_empty());
    let cl = closure(d.alphabet(), &d.seeds(), &rs, &ClosureConfig::new(3)).unwrap();
    let style = mol(&d, "A(C(B(C)), D)");
    assert!(cl.contains(&style));
    assert!(mol(&d, "A(C(B), D)").is_rooted_prefix_of(&style));
    assert!(report.extras.contains(&style));
    assert!(report.extras.contains(&mol(&d, "A(B, _)")));
    let text = report.to_key_values(&d);
    assert!(text.starts_with("status=fail\n"));
}

#[test]
fn three_step_derivation_of_the_middle_molecule() {
    let d = dataset();
    let rs = rules(include_str!("../../../data/motivating_rules.gly"), &d);
    let r = rs.rules();
    let a = d.alphabet();
    let m0 = mol(&d, "A");
    let m1 = apply(a, &m0, m0.root(), 2, &r[1]).unwrap();
    let m2 = apply(a, &m1, m1.root(), 1, &r[0]).unwrap();
    let c = m2.descend(m2.root(), &[2, 1]).unwrap();
    let m3 = apply(a, &m2, c, 1, &r[2]).unwrap();
    assert_eq!(molecule_to_string(a, &m3), "A(C(D), B(C(D)))");
    assert_eq!(&m3, &d.molecules()[2]);
}

#[test]
fn empty_rule_set_covers_only_single_nodes() {
    let d = dataset();
    let report = verify(&RuleSet::empty(), &d, &ClosureConfig::new(4)).unwrap();
    assert!(!report.passed());
    assert!(report.covered.is_empty());
    assert!(report.extras.is_empty());
}
