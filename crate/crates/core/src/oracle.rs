//! Brute-force ground truth.
//!
//! [`mqc_oracle`] scores every unrooted binary tree on the taxa;
//! [`enumerate_pb`] tries every assignment of a small PB instance. Neither
//! prunes anything.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::QuartetSet;
use crate::pb::PBInstance;
use crate::tree::{tree_from_insertion_code, tree_satisfied_count, TreeError, UnrootedPhylogeny};

/// Largest taxon count [`mqc_oracle`] accepts.
pub const MAX_ORACLE_TAXA: usize = 9;
/// Largest variable count [`enumerate_pb`] accepts.
pub const MAX_ENUM_VARS: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle needs 4..={MAX_ORACLE_TAXA} taxa, got {0}")]
    TaxaOutOfRange(usize),
    #[error("enumeration refuses {0} variables (limit {MAX_ENUM_VARS})")]
    TooManyVars(u32),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub optimum: usize,
    /// First optimal tree in enumeration order.
    pub witness: UnrootedPhylogeny,
    pub trees_examined: u64,
}

/// Number of unrooted binary trees on `n ≥ 3` leaves, `(2n−5)!!`.
pub fn tree_count(n: usize) -> u64 {
    (3..n).map(|k| 2 * k as u64 - 3).product()
}

/// Insertion code of the tree at position `index` of the enumeration. The
/// digit for leaf `k` ranges over `0..2k−3`; the last digit varies fastest.
fn code_at(n: usize, mut index: u64) -> Vec<usize> {
    let mut code = vec![0; n - 3];
    for k in (3..n).rev() {
        let radix = 2 * k as u64 - 3;
        code[k - 3] = (index % radix) as usize;
        index /= radix;
    }
    code
}

/// Maximum number of topologies of `q` any single tree satisfies.
pub fn mqc_oracle(q: &QuartetSet) -> Result<OracleResult, OracleError> {
    let n = q.n();
    if !(4..=MAX_ORACLE_TAXA).contains(&n) {
        return Err(OracleError::TaxaOutOfRange(n));
    }
    let total = tree_count(n);
    let score = |index: u64| -> (usize, u64) {
        let t = tree_from_insertion_code(n, &code_at(n, index)).expect("valid code");
        (tree_satisfied_count(&t, q), index)
    };
    // higher score wins, ties go to the earlier tree
    let (optimum, index) = (0..total).into_par_iter().map(score).reduce(
        || (0, u64::MAX),
        |a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        },
    );
    let witness = tree_from_insertion_code(n, &code_at(n, index))?;
    Ok(OracleResult {
        optimum,
        witness,
        trees_examined: total,
    })
}

/// Outcome of exhaustive PB enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumerated {
    Unsatisfiable,
    /// Minimum objective and the first assignment (in counting order) attaining it.
    Optimal {
        objective: i64,
        assignment: Vec<bool>,
    },
}

/// Minimizes the objective over all `2^num_vars` assignments.
pub fn enumerate_pb(inst: &PBInstance) -> Result<Enumerated, OracleError> {
    let nv = inst.num_vars();
    if nv > MAX_ENUM_VARS {
        return Err(OracleError::TooManyVars(nv));
    }
    let mut best: Option<(i64, u64)> = None;
    let mut a = vec![false; nv as usize];
    for bits in 0..1u64 << nv {
        for (k, slot) in a.iter_mut().enumerate() {
            *slot = bits >> k & 1 == 1;
        }
        if inst.constraints().iter().all(|c| c.is_satisfied(&a)) {
            let z = inst.objective_value(&a);
            if best.is_none_or(|(b, _)| z < b) {
                best = Some((z, bits));
            }
        }
    }
    Ok(match best {
        None => Enumerated::Unsatisfiable,
        Some((objective, bits)) => Enumerated::Optimal {
            objective,
            assignment: (0..nv).map(|k| bits >> k & 1 == 1).collect(),
        },
    })
}
