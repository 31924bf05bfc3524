use super::{TreeError, UnrootedPhylogeny};
use crate::model::{QuartetSet, QuartetTopology};
use crate::rng::Lcg;

/// Generator parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub seed: u64,
    /// Percentage of topologies to alter, `0..=100`.
    pub alter_percent: u32,
}

impl GenSpec {
    pub fn new(n: usize, seed: u64, alter_percent: u32) -> Result<Self, TreeError> {
        let spec = Self {
            n,
            seed,
            alter_percent,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), TreeError> {
        if self.n < 4 {
            return Err(TreeError::InvalidSpec(format!(
                "need at least 4 taxa, got {}",
                self.n
            )));
        }
        if self.alter_percent > 100 {
            return Err(TreeError::InvalidSpec(format!(
                "alteration percentage {} exceeds 100",
                self.alter_percent
            )));
        }
        Ok(())
    }

    /// Number of topologies altered out of `total`.
    pub fn altered_count(&self, total: usize) -> usize {
        self.alter_percent as usize * total / 100
    }
}

/// Stream constant separating the alteration draws from the tree draws.
const ALTER_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

/// Builds the tree described by a leaf-insertion code.
///
/// Leaves 0, 1, 2 start joined at one internal node. Leaf `k` (for `k ≥ 3`)
/// is attached to edge `code[k - 3]` of the current tree, which has
/// `2k − 3` edges. Edges keep creation order: splitting edge `(u,v)` with a
/// new node `w` rewrites it in place as `(u,w)` and appends `(w,v)` then
/// `(w,k)`. Every code yields a distinct tree, so the codes enumerate all
/// `(2n−5)!!` unrooted binary trees.
pub fn tree_from_insertion_code(n: usize, code: &[usize]) -> Result<UnrootedPhylogeny, TreeError> {
    if n < 3 {
        return Err(TreeError::InvalidSpec(format!(
            "need at least 3 leaves, got {n}"
        )));
    }
    if code.len() != n - 3 {
        return Err(TreeError::InvalidSpec(format!(
            "insertion code for {n} leaves has {} digits, expected {}",
            code.len(),
            n - 3
        )));
    }
    let mut next = n;
    let hub = next;
    next += 1;
    let mut edges = vec![(0, hub), (1, hub), (2, hub)];
    for (offset, &e) in code.iter().enumerate() {
        let leaf = offset + 3;
        if e >= edges.len() {
            return Err(TreeError::InvalidSpec(format!(
                "edge index {e} out of range for leaf {leaf}"
            )));
        }
        let (u, v) = edges[e];
        let w = next;
        next += 1;
        edges[e] = (u, w);
        edges.push((w, v));
        edges.push((w, leaf));
    }
    UnrootedPhylogeny::from_edges(n, &edges)
}

/// Uniform random unrooted binary tree by sequential random leaf insertion.
pub fn random_tree(spec: &GenSpec) -> Result<UnrootedPhylogeny, TreeError> {
    spec.validate()?;
    let mut rng = Lcg::new(spec.seed);
    let code: Vec<usize> = (3..spec.n).map(|k| rng.below(2 * k - 3)).collect();
    tree_from_insertion_code(spec.n, &code)
}

/// Replaces `floor(alter_percent · |q| / 100)` topologies of a complete set
/// with one of their two alternatives.
///
/// Selection is a partial Fisher–Yates shuffle over topology positions in
/// canonical order; each selected topology then takes alternative
/// `below(2)`. The draws come from an LCG seeded with `seed ^ 0x9E3779B97F4A7C15`.
/// Returns the altered set and the original topologies that were replaced.
pub fn alter_quartets(
    q: &QuartetSet,
    spec: &GenSpec,
) -> Result<(QuartetSet, Vec<QuartetTopology>), TreeError> {
    spec.validate()?;
    if !q.is_complete() {
        return Err(TreeError::InvalidSpec(
            "alteration needs a complete quartet set".into(),
        ));
    }
    let total = q.len();
    let k = spec.altered_count(total);
    let mut rng = Lcg::new(spec.seed ^ ALTER_STREAM);
    let mut order: Vec<usize> = (0..total).collect();
    for i in 0..k {
        let j = i + rng.below(total - i);
        order.swap(i, j);
    }
    let mut originals = Vec::with_capacity(k);
    let mut replacements = Vec::with_capacity(k);
    for &pos in &order[..k] {
        let t = q.topologies()[pos];
        originals.push(t);
        replacements.push(t.alternatives()[rng.below(2)]);
    }
    let altered = q.with_replacements(replacements)?;
    Ok((altered, originals))
}
