use std::collections::HashMap;

use super::{ModelError, TaxonSet};
use crate::binomial;

/// A quartet topology `[a,b|c,d]` stored in canonical form: `a < b`, `c < d`,
/// `a < c`. The derived ordering is lexicographic on `(a, b, c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuartetTopology([usize; 4]);

/// Canonical form of `[a,b|c,d]`.
pub fn canonical_topology(
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> Result<QuartetTopology, ModelError> {
    let raw = [a, b, c, d];
    let mut sorted = raw;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ModelError::InvalidQuartet(raw));
    }
    let left = (a.min(b), a.max(b));
    let right = (c.min(d), c.max(d));
    let (left, right) = if left.0 < right.0 {
        (left, right)
    } else {
        (right, left)
    };
    Ok(QuartetTopology([left.0, left.1, right.0, right.1]))
}

impl QuartetTopology {
    pub fn new(a: usize, b: usize, c: usize, d: usize) -> Result<Self, ModelError> {
        canonical_topology(a, b, c, d)
    }

    /// The three topologies of the 4-set `{w < x < y < z}`, in the order
    /// `[w,x|y,z]`, `[w,y|x,z]`, `[w,z|x,y]`.
    pub fn all_of(set: [usize; 4]) -> Result<[QuartetTopology; 3], ModelError> {
        let mut s = set;
        s.sort_unstable();
        let [w, x, y, z] = s;
        Ok([
            canonical_topology(w, x, y, z)?,
            canonical_topology(w, y, x, z)?,
            canonical_topology(w, z, x, y)?,
        ])
    }

    pub fn left(&self) -> (usize, usize) {
        (self.0[0], self.0[1])
    }

    pub fn right(&self) -> (usize, usize) {
        (self.0[2], self.0[3])
    }

    /// `(a, b, c, d)` of the canonical form.
    pub fn indices(&self) -> [usize; 4] {
        self.0
    }

    /// The underlying quartet, ascending.
    pub fn taxa(&self) -> [usize; 4] {
        let mut s = self.0;
        s.sort_unstable();
        s
    }

    /// Position of this topology within [`QuartetTopology::all_of`].
    pub fn pairing_index(&self) -> usize {
        // a is the smallest taxon; its partner fixes the pairing.
        let s = self.taxa();
        s[1..]
            .iter()
            .position(|&t| t == self.0[1])
            .expect("partner is in set")
    }

    /// The other two topologies of the same quartet, in `all_of` order.
    pub fn alternatives(&self) -> [QuartetTopology; 2] {
        let all = Self::all_of(self.taxa()).expect("valid quartet");
        let mut out = all.iter().copied().filter(|t| t != self);
        [out.next().unwrap(), out.next().unwrap()]
    }

    pub fn max_index(&self) -> usize {
        self.0[1].max(self.0[3])
    }

    pub fn display(&self, taxa: &TaxonSet) -> String {
        let [a, b, c, d] = self.0;
        format!(
            "[{},{}|{},{}]",
            taxa.name(a),
            taxa.name(b),
            taxa.name(c),
            taxa.name(d)
        )
    }
}

/// A set of quartet topologies with at most one topology per 4-subset.
///
/// Topologies are kept sorted in canonical order; topology index `t` used by
/// the encoder is the position in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuartetSet {
    taxa: TaxonSet,
    topologies: Vec<QuartetTopology>,
    by_quartet: HashMap<[usize; 4], usize>,
}

impl QuartetSet {
    pub fn new<I>(taxa: TaxonSet, topologies: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = QuartetTopology>,
    {
        let n = taxa.len();
        let mut topologies: Vec<QuartetTopology> = topologies.into_iter().collect();
        for t in &topologies {
            if t.max_index() >= n {
                return Err(ModelError::TaxonOutOfRange {
                    index: t.max_index(),
                    n,
                });
            }
        }
        topologies.sort_unstable();
        let mut by_quartet = HashMap::with_capacity(topologies.len());
        for (i, t) in topologies.iter().enumerate() {
            if by_quartet.insert(t.taxa(), i).is_some() {
                return Err(ModelError::DuplicateQuartet(t.taxa()));
            }
        }
        Ok(Self {
            taxa,
            topologies,
            by_quartet,
        })
    }

    /// Complete set built by choosing one topology per 4-subset.
    pub fn complete_from<F>(taxa: TaxonSet, mut choose: F) -> Self
    where
        F: FnMut([usize; 4]) -> QuartetTopology,
    {
        let n = taxa.len();
        let mut tops = Vec::with_capacity(binomial(n, 4));
        for_each_quartet(n, |q| tops.push(choose(q)));
        Self::new(taxa, tops).expect("one topology per quartet")
    }

    pub fn taxa(&self) -> &TaxonSet {
        &self.taxa
    }

    pub fn n(&self) -> usize {
        self.taxa.len()
    }

    pub fn len(&self) -> usize {
        self.topologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topologies.is_empty()
    }

    pub fn topologies(&self) -> &[QuartetTopology] {
        &self.topologies
    }

    pub fn iter(&self) -> impl Iterator<Item = &QuartetTopology> {
        self.topologies.iter()
    }

    /// Stored topology for a 4-subset (any order).
    pub fn topology_of(&self, quartet: [usize; 4]) -> Option<QuartetTopology> {
        let mut key = quartet;
        key.sort_unstable();
        self.by_quartet.get(&key).map(|&i| self.topologies[i])
    }

    pub fn contains(&self, topology: &QuartetTopology) -> bool {
        self.topology_of(topology.taxa()) == Some(*topology)
    }

    /// True iff every 4-subset has exactly one topology.
    pub fn is_complete(&self) -> bool {
        // Duplicates are rejected at construction, so the count decides it.
        self.topologies.len() == binomial(self.n(), 4)
    }

    /// Copy with the topology of each listed quartet replaced.
    pub fn with_replacements<I>(&self, replacements: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = QuartetTopology>,
    {
        let mut tops = self.topologies.clone();
        for r in replacements {
            match self.by_quartet.get(&r.taxa()) {
                Some(&i) => tops[i] = r,
                None => tops.push(r),
            }
        }
        Self::new(self.taxa.clone(), tops)
    }

    /// Copy with the listed quartets removed.
    pub fn without(&self, quartets: &[[usize; 4]]) -> Self {
        let drop: Vec<[usize; 4]> = quartets
            .iter()
            .map(|q| {
                let mut k = *q;
                k.sort_unstable();
                k
            })
            .collect();
        let tops = self
            .topologies
            .iter()
            .copied()
            .filter(|t| !drop.contains(&t.taxa()));
        Self::new(self.taxa.clone(), tops).expect("subset of a valid set")
    }
}

/// Visits every 4-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_quartet<F: FnMut([usize; 4])>(n: usize, mut f: F) {
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    f([a, b, c, d]);
                }
            }
        }
    }
}
