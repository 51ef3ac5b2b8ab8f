use std::collections::{BTreeSet, HashSet};

use crate::alphabet::{MonomerAlphabet, SugarId};
use crate::tree::Molecule;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset has no molecules")]
    Empty,
    #[error("molecule #{0} duplicates an earlier molecule")]
    Duplicate(usize),
}

/// An alphabet together with the observed molecules μ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    alphabet: MonomerAlphabet,
    molecules: Vec<Molecule>,
}

impl Dataset {
    pub fn new(alphabet: MonomerAlphabet, molecules: Vec<Molecule>) -> Result<Self, DatasetError> {
        if molecules.is_empty() {
            return Err(DatasetError::Empty);
        }
        let mut seen = HashSet::new();
        for (i, m) in molecules.iter().enumerate() {
            if !seen.insert(m) {
                return Err(DatasetError::Duplicate(i));
            }
        }
        Ok(Dataset {
            alphabet,
            molecules,
        })
    }

    pub fn alphabet(&self) -> &MonomerAlphabet {
        &self.alphabet
    }

    pub fn molecules(&self) -> &[Molecule] {
        &self.molecules
    }

    pub fn max_height(&self) -> usize {
        self.molecules.iter().map(|m| m.height()).max().unwrap_or(0)
    }

    /// Labels of the molecule roots; the seeds from which production starts.
    pub fn root_labels(&self) -> BTreeSet<SugarId> {
        self.molecules.iter().map(|m| m.label(m.root())).collect()
    }

    /// Single-node molecules of the root labels.
    pub fn seeds(&self) -> Vec<Molecule> {
        self.root_labels()
            .into_iter()
            .map(|s| Molecule::single(&self.alphabet, s))
            .collect()
    }

    /// `m` is an acceptable intermediate: a rooted prefix of some observed molecule.
    pub fn accepts_prefix(&self, m: &Molecule) -> bool {
        self.molecules.iter().any(|o| m.is_rooted_prefix_of(o))
    }

    pub fn contains(&self, m: &Molecule) -> bool {
        self.molecules.iter().any(|o| o == m)
    }
}
