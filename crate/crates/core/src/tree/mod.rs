//! Phylogenies: unrooted binary trees, rooted labeled trees, quartet
//! derivation, Newick I/O, instance generation and ultrametric decoding.

mod generate;
pub mod newick;
mod rooted;
mod unrooted;

use thiserror::Error;

use crate::model::ModelError;

pub use generate::{alter_quartets, random_tree, tree_from_insertion_code, GenSpec};
pub use rooted::{decode_matrix, unroot, RootedNode, RootedPhylogeny};
pub use unrooted::{
    derive_all, derive_topology, tree_satisfied_count, trees_isomorphic, UnrootedPhylogeny,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid tree: {0}")]
    Invalid(String),
    #[error("matrix is not ultrametric: triple ({0},{1},{2}) has a unique maximum")]
    NotUltrametric(usize, usize, usize),
    #[error("trees are over different taxon sets ({0} vs {1} leaves)")]
    TaxaMismatch(usize, usize),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
