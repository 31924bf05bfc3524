//! JSON run report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use qmqc::{MqcSolution, QuartetSet};

#[derive(Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub n: usize,
    pub quartets: usize,
    pub model: String,
    pub siblings: bool,
    pub fixed_pairs: Vec<[String; 2]>,
    pub num_vars: u32,
    pub num_constraints: usize,
    /// Topologies the decoded matrix is consistent with (`−objective`).
    pub satisfied: usize,
    pub quartet_errors: usize,
    /// Topologies the output tree satisfies, counted on the tree. Never
    /// below `satisfied`; above it when resolving ties in the matrix
    /// happened to satisfy more topologies.
    pub recount: usize,
    /// The instance minimizes `Σ −q_t`.
    pub objective: i64,
    pub solver: SolverReport,
    pub tree: String,
    pub provenance: Provenance,
}

#[derive(Serialize)]
pub struct SolverReport {
    pub status: String,
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub solutions: u64,
    pub elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct Provenance {
    pub input: String,
    /// `key=value` pairs from the quartet file's comments, e.g. `seed`.
    pub header: BTreeMap<String, String>,
}

impl RunReport {
    pub fn new(
        q: &QuartetSet,
        sol: &MqcSolution,
        tree: String,
        input: &Path,
        comments: &[String],
    ) -> Self {
        let taxa = q.taxa();
        let stats = &sol.result.stats;
        let header = comments
            .iter()
            .filter_map(|c| c.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self {
            schema: 1,
            n: q.n(),
            quartets: q.len(),
            model: sol.variant.encoding.name().to_string(),
            siblings: sol.variant.siblings,
            fixed_pairs: sol
                .fixed_pairs
                .iter()
                .map(|&(i, j)| [taxa.name(i).to_string(), taxa.name(j).to_string()])
                .collect(),
            num_vars: sol.num_vars,
            num_constraints: sol.num_constraints,
            satisfied: sol.satisfied(),
            quartet_errors: q.len() - sol.satisfied(),
            recount: sol.recount,
            objective: sol.result.objective.unwrap_or(0),
            solver: SolverReport {
                status: format!("{:?}", sol.result.status),
                decisions: stats.decisions,
                propagations: stats.propagations,
                conflicts: stats.conflicts,
                solutions: stats.solutions,
                elapsed_ms: stats.elapsed.as_secs_f64() * 1e3,
            },
            tree,
            provenance: Provenance {
                input: input.display().to_string(),
                header,
            },
        }
    }
}
