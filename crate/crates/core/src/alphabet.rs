use std::collections::HashMap;
use std::fmt;

use crate::error::ModelError;

/// Index of a monomer inside a [`MonomerAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SugarId(pub u16);

impl SugarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomer {
    pub name: String,
    pub arity: usize,
}

/// Ordered set of monomer names with their arities (number of indexed child slots).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomerAlphabet {
    entries: Vec<Monomer>,
    by_name: HashMap<String, SugarId>,
}

impl MonomerAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet from `(name, arity)` pairs.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut alphabet = Self::new();
        for (name, arity) in pairs {
            alphabet.declare(name, arity)?;
        }
        Ok(alphabet)
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<SugarId, ModelError> {
        if name.is_empty() || !is_identifier(name) {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(ModelError::DuplicateMonomer(name.to_string()));
        }
        let id = SugarId(self.entries.len() as u16);
        self.entries.push(Monomer {
            name: name.to_string(),
            arity,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SugarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: SugarId) -> &str {
        &self.entries[id.index()].name
    }

    pub fn arity(&self, id: SugarId) -> usize {
        self.entries[id.index()].arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SugarId> + '_ {
        (0..self.entries.len()).map(|i| SugarId(i as u16))
    }

    pub fn entries(&self) -> &[Monomer] {
        &self.entries
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|m| m.arity).max().unwrap_or(0)
    }
}

impl fmt::Display for MonomerAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.entries {
            writeln!(f, "sugar {} {}", m.name, m.arity)?;
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_names() {
        let mut a = MonomerAlphabet::new();
        a.declare("GalNAc", 2).unwrap();
        assert!(matches!(
            a.declare("GalNAc", 1),
            Err(ModelError::DuplicateMonomer(_))
        ));
        assert!(matches!(a.declare("", 1), Err(ModelError::InvalidName(_))));
        assert!(matches!(a.declare("_", 1), Err(ModelError::InvalidName(_))));
        assert_eq!(a.max_arity(), 2);
    }
}
