use thiserror::Error;

/// Violations of the structural invariants of monomers, molecules and rules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid monomer name `{0}`")]
    InvalidName(String),
    #[error("monomer `{0}` declared twice")]
    DuplicateMonomer(String),
    #[error("slot {slot} is outside 1..={arity} for monomer `{name}`")]
    SlotOutOfRange {
        name: String,
        slot: usize,
        arity: usize,
    },
    #[error("slot {slot} of node {node} is already occupied")]
    SlotOccupied { node: u32, slot: usize },
    #[error("node {0} does not exist")]
    NoSuchNode(u32),
    #[error("the expanding part must be rooted strictly below the rule root")]
    ExpandAtRoot,
    #[error("hard end at node {node}, slot {slot} is not an empty slot of a matching node")]
    BadHardEnd { node: u32, slot: usize },
    #[error("compartment must be at least 1")]
    ZeroCompartment,
    #[error("rule compartment {compartment} exceeds the compartment count {count}")]
    CompartmentOutOfRange { compartment: u32, count: u32 },
}
