//! Taxa, quartet topologies and ultrametric matrices.
//!
//! Taxa are addressed by 0-based index in the order they were declared.

mod matrix;
pub mod qrt;
mod quartet;
mod siblings;

use std::collections::HashMap;

use thiserror::Error;

pub use matrix::{matrix_consistency, matrix_satisfied_count, UltrametricMatrix};
pub use quartet::{canonical_topology, QuartetSet, QuartetTopology};
pub use siblings::{detect_siblings, SiblingsReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid quartet: indices {0:?} are not four distinct taxa")]
    InvalidQuartet([usize; 4]),
    #[error("taxon index {index} out of range for {n} taxa")]
    TaxonOutOfRange { index: usize, n: usize },
    #[error("duplicate topology for quartet {0:?}")]
    DuplicateQuartet([usize; 4]),
    #[error("invalid taxon name {0:?}")]
    InvalidName(String),
    #[error("duplicate taxon name {0:?}")]
    DuplicateName(String),
    #[error("quartet set is not complete ({have} of {want} topologies)")]
    Incomplete { have: usize, want: usize },
    #[error("matrix entry ({i},{j}) must be at least 1, got {value}")]
    InvalidEntry { i: usize, j: usize, value: u32 },
    #[error("expected {want} matrix entries, got {got}")]
    EntryCount { want: usize, got: usize },
}

/// Ordered set of distinct taxon names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl TaxonSet {
    pub fn new<I, S>(names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let bad = name.is_empty()
                || name
                    .chars()
                    .any(|c| c.is_whitespace() || "(),:;|#'[]".contains(c));
            if bad {
                return Err(ModelError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// Taxa named `t1`, `t2`, ... `tn`.
    pub fn numbered(n: usize) -> Self {
        Self::new((1..=n).map(|i| format!("t{i}"))).expect("generated names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taxon_set_rejects_duplicates_and_bad_names() {
        assert!(matches!(
            TaxonSet::new(["a", "b", "a"]),
            Err(ModelError::DuplicateName(_))
        ));
        assert!(matches!(
            TaxonSet::new(["a", ""]),
            Err(ModelError::InvalidName(_))
        ));
        assert!(matches!(
            TaxonSet::new(["a b"]),
            Err(ModelError::InvalidName(_))
        ));
        let t = TaxonSet::new(["x", "y"]).unwrap();
        assert_eq!(t.index_of("y"), Some(1));
        assert_eq!(t.name(0), "x");
    }
}
