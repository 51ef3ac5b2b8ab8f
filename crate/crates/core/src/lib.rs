//! Monomers, molecules and production rules for glycan assembly, with the text formats
//! and a forward-production oracle that enumerates what a rule set can build.

pub mod accept;
pub mod alphabet;
pub mod dataset;
pub mod dot;
pub mod error;
pub mod parse;
pub mod produce;
pub mod rule;
pub mod sample;
pub mod text;
pub mod tree;
pub mod verify;

pub use accept::{accepted, accepted_by_any, RepeatConfig};
pub use alphabet::{Monomer, MonomerAlphabet, SugarId};
pub use dataset::{Dataset, DatasetError};
pub use error::ModelError;
pub use parse::{
    parse_dataset, parse_document, parse_molecule, parse_rule, parse_rules, parse_rules_with,
    Document, ParseError, ParseErrorKind, RuleFile,
};
pub use produce::{apply, applicable, closure, Closure, ClosureConfig, ClosureError, Site};
pub use rule::{Rule, RuleSet, Situation, Speed};
pub use text::{dataset_to_string, molecule_to_string, rule_to_string, rules_to_string};
pub use tree::{Molecule, NodeId, Tree};
pub use verify::{verify, Derivation, VerificationReport};
