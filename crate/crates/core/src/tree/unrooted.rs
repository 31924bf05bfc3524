use std::collections::{BTreeSet, VecDeque};

use super::TreeError;
use crate::model::{QuartetSet, QuartetTopology, TaxonSet};

/// Unrooted leaf-labeled tree. Nodes `0..n` are the leaves (leaf `i` carries
/// taxon `i`); nodes from `n` on are internal and have degree exactly three.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrootedPhylogeny {
    leaves: usize,
    adj: Vec<Vec<usize>>,
}

impl UnrootedPhylogeny {
    /// Builds from an edge list and checks every structural invariant.
    pub fn from_edges(leaves: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        let nodes = edges
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .max()
            .map_or(leaves, |m| (m + 1).max(leaves));
        let mut adj = vec![Vec::new(); nodes];
        for &(u, v) in edges {
            if u == v {
                return Err(TreeError::Invalid(format!("self loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let t = Self { leaves, adj };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        let n = self.leaves;
        let nodes = self.adj.len();
        if n < 2 {
            return Err(TreeError::Invalid("need at least two leaves".into()));
        }
        let edges: usize = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        if edges + 1 != nodes {
            return Err(TreeError::Invalid(format!(
                "{nodes} nodes but {edges} edges"
            )));
        }
        for (v, nb) in self.adj.iter().enumerate() {
            let want = if v < n { 1 } else { 3 };
            if nb.len() != want {
                return Err(TreeError::Invalid(format!(
                    "node {v} has degree {}, expected {want}",
                    nb.len()
                )));
            }
        }
        // connected + |E| = |V| - 1 => acyclic
        let mut seen = vec![false; nodes];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != nodes {
            return Err(TreeError::Invalid("tree is disconnected".into()));
        }
        if n >= 3 && nodes != 2 * n - 2 {
            return Err(TreeError::Invalid(format!("{nodes} nodes for {n} leaves")));
        }
        Ok(())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn internal_count(&self) -> usize {
        self.adj.len() - self.leaves
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn bfs(&self, from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Edge-count distances between all leaf pairs, `n × n` row-major.
    pub fn leaf_distances(&self) -> Vec<u32> {
        let n = self.leaves;
        let mut out = vec![0; n * n];
        for i in 0..n {
            let d = self.bfs(i);
            out[i * n..(i + 1) * n].copy_from_slice(&d[..n]);
        }
        out
    }

    /// Non-trivial splits, each given by the side that excludes leaf 0.
    pub fn splits(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for (u, v) in self.edges() {
            if u < self.leaves || v < self.leaves {
                continue;
            }
            // leaves reachable from v without crossing (u,v)
            let mut side = Vec::new();
            let mut stack = vec![(v, u)];
            while let Some((x, parent)) = stack.pop() {
                if x < self.leaves {
                    side.push(x);
                }
                for &y in &self.adj[x] {
                    if y != parent {
                        stack.push((y, x));
                    }
                }
            }
            if side.contains(&0) {
                let inside: BTreeSet<usize> = side.into_iter().collect();
                side = (0..self.leaves).filter(|x| !inside.contains(x)).collect();
            }
            side.sort_unstable();
            out.insert(side);
        }
        out
    }

    /// Leaf pairs sharing a parent.
    pub fn cherries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in self.leaves..self.adj.len() {
            let leaves: Vec<usize> = self.adj[v]
                .iter()
                .copied()
                .filter(|&w| w < self.leaves)
                .collect();
            for (a, &x) in leaves.iter().enumerate() {
                for &y in &leaves[a + 1..] {
                    out.push((x.min(y), x.max(y)));
                }
            }
        }
        if self.leaves == 2 {
            out.push((0, 1));
        }
        out.sort_unstable();
        out
    }
}

/// Pairing of `[a,b,c,d]` with the smallest path-length sum; for a binary tree
/// the two connecting paths of that pairing are vertex-disjoint.
fn four_point(dist: impl Fn(usize, usize) -> u32, q: [usize; 4]) -> QuartetTopology {
    let [a, b, c, d] = q;
    let sums = [
        dist(a, b) + dist(c, d),
        dist(a, c) + dist(b, d),
        dist(a, d) + dist(b, c),
    ];
    let best = (0..3).min_by_key(|&k| sums[k]).unwrap();
    QuartetTopology::all_of(q).expect("distinct leaves")[best]
}

/// Quartet topology induced by the tree on four distinct leaves.
pub fn derive_topology(
    t: &UnrootedPhylogeny,
    quartet: [usize; 4],
) -> Result<QuartetTopology, TreeError> {
    let mut s = quartet;
    s.sort_unstable();
    QuartetTopology::all_of(s)?;
    if s[3] >= t.leaf_count() {
        return Err(TreeError::Invalid(format!("leaf {} not in tree", s[3])));
    }
    let rows: Vec<Vec<u32>> = s.iter().map(|&x| t.bfs(x)).collect();
    let dist = |x: usize, y: usize| {
        let r = s.iter().position(|&v| v == x).unwrap();
        rows[r][y]
    };
    Ok(four_point(dist, s))
}

/// All `C(n,4)` topologies induced by the tree.
pub fn derive_all(t: &UnrootedPhylogeny, taxa: &TaxonSet) -> Result<QuartetSet, TreeError> {
    if taxa.len() != t.leaf_count() {
        return Err(TreeError::TaxaMismatch(taxa.len(), t.leaf_count()));
    }
    let n = t.leaf_count();
    let d = t.leaf_distances();
    Ok(QuartetSet::complete_from(taxa.clone(), |q| {
        four_point(|x, y| d[x * n + y], q)
    }))
}

/// Number of topologies in `q` equal to the tree's induced topology.
pub fn tree_satisfied_count(t: &UnrootedPhylogeny, q: &QuartetSet) -> usize {
    let n = t.leaf_count();
    let d = t.leaf_distances();
    q.iter()
        .filter(|topo| four_point(|x, y| d[x * n + y], topo.taxa()) == **topo)
        .count()
}

/// Same leaf-labeled topology, compared by split sets.
pub fn trees_isomorphic(a: &UnrootedPhylogeny, b: &UnrootedPhylogeny) -> Result<bool, TreeError> {
    if a.leaf_count() != b.leaf_count() {
        return Err(TreeError::TaxaMismatch(a.leaf_count(), b.leaf_count()));
    }
    Ok(a.splits() == b.splits())
}
