//! Exact Maximum Quartet Consistency (MQC) by pseudo-Boolean optimization.
//!
//! A complete set of quartet topologies is encoded as a pseudo-Boolean
//! optimization problem over the entries of an ultrametric matrix. The
//! matrix read back from an optimal assignment is the LCA-label matrix of a
//! rooted phylogeny; unrooting that phylogeny yields a tree satisfying the
//! maximum number of input quartets.
//!
//! Layout:
//! - [`model`]: taxa, quartet topologies, ultrametric matrices, sibling detection
//! - [`tree`]: phylogenies, quartet derivation, Newick, instance generation
//! - [`pb`]: PB constraints, reified gate/comparator builders, OPB I/O
//! - [`encoder`]: the three MQC encodings and assignment decoding
//! - [`solver`]: exact branch-and-bound PB optimizer
//! - [`oracle`]: brute-force ground truth
//! - [`pipeline`]: quartets in, tree out

pub mod encoder;
pub mod model;
pub mod oracle;
pub mod pb;
pub mod pipeline;
pub mod rng;
pub mod solver;
pub mod tree;

pub use encoder::{decode_assignment, encode, Encoding, ModelVariant, VarMap};
pub use model::{QuartetSet, QuartetTopology, TaxonSet, UltrametricMatrix};
pub use pb::{Lit, PBConstraint, PBInstance, Var};
pub use pipeline::{solve_mqc, MqcSolution};
pub use solver::{check_model, solve, SolveResult, SolveStats, SolveStatus, SolverConfig};
pub use tree::{RootedPhylogeny, UnrootedPhylogeny};

/// Binomial coefficient, small arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(5, 4), 5);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(4, 0), 1);
    }
}
