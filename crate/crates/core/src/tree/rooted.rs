use super::{TreeError, UnrootedPhylogeny};
use crate::model::UltrametricMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootedNode {
    Leaf(usize),
    Internal {
        children: Vec<usize>,
        label: Option<u32>,
    },
}

/// Rooted leaf-labeled tree stored as an arena; internal nodes may carry
/// integer labels and may have any number (≥ 2) of children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedPhylogeny {
    nodes: Vec<RootedNode>,
    root: usize,
    leaves: usize,
}

impl RootedPhylogeny {
    /// Checks that leaves are exactly `0..leaves`, each once, and every
    /// internal node has at least two children.
    pub fn new(nodes: Vec<RootedNode>, root: usize) -> Result<Self, TreeError> {
        let mut seen_leaf = Vec::new();
        let mut visited = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let node = nodes
                .get(v)
                .ok_or_else(|| TreeError::Invalid(format!("node {v} out of range")))?;
            if std::mem::replace(&mut visited[v], true) {
                return Err(TreeError::Invalid(format!("node {v} reached twice")));
            }
            match node {
                RootedNode::Leaf(t) => seen_leaf.push(*t),
                RootedNode::Internal { children, .. } => {
                    if children.len() < 2 {
                        return Err(TreeError::Invalid(format!(
                            "node {v} has fewer than 2 children"
                        )));
                    }
                    stack.extend(children.iter().copied());
                }
            }
        }
        seen_leaf.sort_unstable();
        if seen_leaf.iter().enumerate().any(|(i, &t)| i != t) {
            return Err(TreeError::Invalid(
                "leaves must be taxa 0..n, each once".into(),
            ));
        }
        let leaves = seen_leaf.len();
        Ok(Self {
            nodes,
            root,
            leaves,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, v: usize) -> &RootedNode {
        &self.nodes[v]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn children(&self, v: usize) -> &[usize] {
        match &self.nodes[v] {
            RootedNode::Leaf(_) => &[],
            RootedNode::Internal { children, .. } => children,
        }
    }

    pub fn label(&self, v: usize) -> Option<u32> {
        match &self.nodes[v] {
            RootedNode::Leaf(_) => None,
            RootedNode::Internal { label, .. } => *label,
        }
    }

    /// Taxa below `v`, ascending.
    pub fn leaves_below(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            match &self.nodes[x] {
                RootedNode::Leaf(t) => out.push(*t),
                RootedNode::Internal { children, .. } => stack.extend(children.iter().copied()),
            }
        }
        out.sort_unstable();
        out
    }

    /// Copy whose internal labels are heights: leaves count 0 and each
    /// internal node is one more than its highest child.
    pub fn with_height_labels(&self) -> Self {
        let mut nodes = self.nodes.clone();
        fn height(nodes: &mut [RootedNode], v: usize) -> u32 {
            let children = match &nodes[v] {
                RootedNode::Leaf(_) => return 0,
                RootedNode::Internal { children, .. } => children.clone(),
            };
            let h = 1 + children
                .iter()
                .map(|&c| height(nodes, c))
                .max()
                .unwrap_or(0);
            if let RootedNode::Internal { label, .. } = &mut nodes[v] {
                *label = Some(h);
            }
            h
        }
        height(&mut nodes, self.root);
        Self {
            nodes,
            root: self.root,
            leaves: self.leaves,
        }
    }

    /// Matrix of LCA labels. Every internal node must be labeled.
    pub fn lca_matrix(&self) -> Result<UltrametricMatrix, TreeError> {
        let mut m = UltrametricMatrix::filled(self.leaves, 1);
        for (v, node) in self.nodes.iter().enumerate() {
            let RootedNode::Internal { children, label } = node else {
                continue;
            };
            // unreachable arena slots are ignored by construction of `new`
            let label =
                label.ok_or_else(|| TreeError::Invalid(format!("node {v} is unlabeled")))?;
            let groups: Vec<Vec<usize>> = children.iter().map(|&c| self.leaves_below(c)).collect();
            for (a, ga) in groups.iter().enumerate() {
                for gb in &groups[a + 1..] {
                    for &x in ga {
                        for &y in gb {
                            m.set(x, y, label)?;
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Rooted tree whose LCA labels reproduce an ultrametric matrix.
///
/// The root takes the largest entry `v`; its children are the classes of
/// `i ~ j ⟺ M(i,j) < v`, ordered by smallest taxon, and each class is
/// decoded recursively. Singleton classes become leaves.
pub fn decode_matrix(m: &UltrametricMatrix) -> Result<RootedPhylogeny, TreeError> {
    if let Some((i, j, l)) = m.violating_triple() {
        return Err(TreeError::NotUltrametric(i, j, l));
    }
    if m.n() == 0 {
        return Err(TreeError::Invalid("empty matrix".into()));
    }
    let mut nodes = Vec::new();
    let all: Vec<usize> = (0..m.n()).collect();
    let root = build_class(m, &all, &mut nodes);
    RootedPhylogeny::new(nodes, root)
}

fn build_class(m: &UltrametricMatrix, members: &[usize], nodes: &mut Vec<RootedNode>) -> usize {
    if let [only] = members {
        nodes.push(RootedNode::Leaf(*only));
        return nodes.len() - 1;
    }
    let mut top = 0;
    for (a, &x) in members.iter().enumerate() {
        for &y in &members[a + 1..] {
            top = top.max(m.get(x, y));
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &x in members {
        match classes.iter_mut().find(|c| m.get(c[0], x) < top) {
            Some(c) => c.push(x),
            None => classes.push(vec![x]),
        }
    }
    let slot = nodes.len();
    nodes.push(RootedNode::Internal {
        children: Vec::new(),
        label: Some(top),
    });
    let children: Vec<usize> = classes.iter().map(|c| build_class(m, c, nodes)).collect();
    nodes[slot] = RootedNode::Internal {
        children,
        label: Some(top),
    };
    slot
}

/// Unrooted binary tree from a rooted tree.
///
/// Each internal node's children, ordered by smallest contained taxon, are
/// joined left to right into a caterpillar of new degree-3 nodes; the
/// resulting degree-2 root is then suppressed.
pub fn unroot(t: &RootedPhylogeny) -> Result<UnrootedPhylogeny, TreeError> {
    let n = t.leaf_count();
    if n < 2 {
        return Err(TreeError::Invalid("need at least two leaves".into()));
    }
    let mut edges = Vec::with_capacity(2 * n);
    let mut next = n;
    let top = attach(t, t.root(), &mut edges, &mut next);
    // `top` is the last node allocated and has exactly two edges.
    debug_assert_eq!(top, next - 1);
    let around: Vec<usize> = edges
        .iter()
        .filter_map(|&(u, v)| {
            if u == top {
                Some(v)
            } else if v == top {
                Some(u)
            } else {
                None
            }
        })
        .collect();
    edges.retain(|&(u, v)| u != top && v != top);
    edges.push((around[0], around[1]));
    UnrootedPhylogeny::from_edges(n, &edges)
}

fn attach(
    t: &RootedPhylogeny,
    v: usize,
    edges: &mut Vec<(usize, usize)>,
    next: &mut usize,
) -> usize {
    match t.node(v) {
        RootedNode::Leaf(x) => *x,
        RootedNode::Internal { children, .. } => {
            let mut ordered: Vec<(usize, usize)> = children
                .iter()
                .map(|&c| (t.leaves_below(c)[0], c))
                .collect();
            ordered.sort_unstable();
            let mut cur = attach(t, ordered[0].1, edges, next);
            for &(_, c) in &ordered[1..] {
                let sub = attach(t, c, edges, next);
                let w = *next;
                *next += 1;
                edges.push((w, cur));
                edges.push((w, sub));
                cur = w;
            }
            cur
        }
    }
}
