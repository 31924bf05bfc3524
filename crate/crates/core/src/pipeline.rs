//! End-to-end reconstruction: encode, solve, decode, unroot, recount.

use thiserror::Error;

use crate::encoder::{decode_assignment, encode, EncodeError, ModelVariant, Pair, VarMap};
use crate::model::{QuartetSet, UltrametricMatrix};
use crate::solver::{solve, SolveResult, SolveStatus, SolverConfig};
use crate::tree::{
    decode_matrix, tree_satisfied_count, unroot, RootedPhylogeny, TreeError, UnrootedPhylogeny,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("solver finished with status {0:?} and no optimal assignment")]
    NotOptimal(SolveStatus),
    #[error("decoded matrix satisfies {matrix} topologies but the tree only {tree}")]
    Recount { matrix: usize, tree: usize },
}

/// What an assignment decodes to.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub matrix: UltrametricMatrix,
    /// `q_t` per topology, in quartet-set order.
    pub flags: Vec<bool>,
    pub rooted: RootedPhylogeny,
    pub tree: UnrootedPhylogeny,
}

impl Reconstruction {
    /// Number of topologies the matrix is consistent with.
    pub fn satisfied(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Decodes an assignment into a matrix and the phylogenies it describes.
pub fn reconstruct(map: &VarMap, assignment: &[bool]) -> Result<Reconstruction, PipelineError> {
    let (matrix, flags) = decode_assignment(map, assignment)?;
    let rooted = decode_matrix(&matrix)?;
    let tree = unroot(&rooted)?;
    Ok(Reconstruction {
        matrix,
        flags,
        rooted,
        tree,
    })
}

#[derive(Clone, Debug)]
pub struct MqcSolution {
    pub variant: ModelVariant,
    pub num_vars: u32,
    pub num_constraints: usize,
    pub fixed_pairs: Vec<Pair>,
    pub result: SolveResult,
    pub reconstruction: Reconstruction,
    /// Topologies of the input satisfied by the output tree, counted
    /// directly on the tree. Never below [`Reconstruction::satisfied`].
    pub recount: usize,
}

impl MqcSolution {
    pub fn satisfied(&self) -> usize {
        self.reconstruction.satisfied()
    }

    pub fn tree(&self) -> &UnrootedPhylogeny {
        &self.reconstruction.tree
    }
}

/// Solves MQC on `q` with one model variant.
pub fn solve_mqc(
    q: &QuartetSet,
    variant: ModelVariant,
    config: &SolverConfig,
) -> Result<MqcSolution, PipelineError> {
    let (inst, map) = encode(q, variant)?;
    let result = solve(&inst, config);
    let assignment = match (&result.status, &result.assignment) {
        (SolveStatus::Optimal, Some(a)) => a,
        _ => return Err(PipelineError::NotOptimal(result.status)),
    };
    let reconstruction = reconstruct(&map, assignment)?;
    let recount = tree_satisfied_count(&reconstruction.tree, q);
    if recount < reconstruction.satisfied() {
        return Err(PipelineError::Recount {
            matrix: reconstruction.satisfied(),
            tree: recount,
        });
    }
    Ok(MqcSolution {
        variant,
        num_vars: inst.num_vars(),
        num_constraints: inst.num_constraints(),
        fixed_pairs: map.fixed_pairs().to_vec(),
        result,
        reconstruction,
        recount,
    })
}
