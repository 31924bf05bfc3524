use super::{ModelError, QuartetSet, QuartetTopology};

/// Symmetric integer matrix of LCA labels. Only the strict upper triangle is
/// stored; the diagonal is implicitly zero and every off-diagonal entry is at
/// least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UltrametricMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl UltrametricMatrix {
    /// Matrix with every off-diagonal entry set to `value`.
    pub fn filled(n: usize, value: u32) -> Self {
        assert!(value >= 1, "entries are at least 1");
        Self {
            n,
            entries: vec![value; n * n.saturating_sub(1) / 2],
        }
    }

    /// Builds from a function of `(i, j)` with `i < j`.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(usize, usize) -> u32,
    {
        let mut m = Self::filled(n, 1);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, f(i, j))?;
            }
        }
        Ok(m)
    }

    /// Builds from the upper triangle listed row by row.
    pub fn from_upper(n: usize, entries: Vec<u32>) -> Result<Self, ModelError> {
        let want = n * n.saturating_sub(1) / 2;
        if entries.len() != want {
            return Err(ModelError::EntryCount {
                want,
                got: entries.len(),
            });
        }
        let mut it = entries.into_iter();
        Self::from_fn(n, |_, _| it.next().unwrap())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        // rows 0..i contribute (n-1) + (n-2) + ... + (n-i) entries
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// `M(i,j)`; symmetric, zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => self.entries[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.entries[self.offset(j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: u32) -> Result<(), ModelError> {
        if value == 0 || i == j {
            return Err(ModelError::InvalidEntry { i, j, value });
        }
        let (a, b) = (i.min(j), i.max(j));
        if b >= self.n {
            return Err(ModelError::TaxonOutOfRange {
                index: b,
                n: self.n,
            });
        }
        let off = self.offset(a, b);
        self.entries[off] = value;
        Ok(())
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// First triple `i<j<l` whose maximum entry is attained only once.
    pub fn violating_triple(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                for l in j + 1..self.n {
                    let mut v = [self.get(i, j), self.get(i, l), self.get(j, l)];
                    v.sort_unstable();
                    if v[1] != v[2] {
                        return Some((i, j, l));
                    }
                }
            }
        }
        None
    }

    /// Three-point condition: every triple's maximum is attained at least twice.
    pub fn is_ultrametric(&self) -> bool {
        self.violating_triple().is_none()
    }
}

/// Whether the matrix makes `[i,j|l,m]` consistent:
/// `(M(i,l) > M(i,j) ∧ M(j,m) > M(i,j)) ∨ (M(i,l) > M(l,m) ∧ M(j,m) > M(l,m))`.
pub fn matrix_consistency(m: &UltrametricMatrix, t: &QuartetTopology) -> bool {
    let [i, j, l, mm] = t.indices();
    let (il, jm) = (m.get(i, l), m.get(j, mm));
    let ij = m.get(i, j);
    let lm = m.get(l, mm);
    (il > ij && jm > ij) || (il > lm && jm > lm)
}

/// Number of topologies in `q` consistent with `m`.
pub fn matrix_satisfied_count(m: &UltrametricMatrix, q: &QuartetSet) -> usize {
    q.iter().filter(|t| matrix_consistency(m, t)).count()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::canonical_topology;

    /// The 7-taxon example matrix over taxa a..g.
    pub(crate) fn example_matrix() -> UltrametricMatrix {
        #[rustfmt::skip]
        let upper = vec![
            1, 4, 4, 4, 4, 2, // a
               4, 4, 4, 4, 2, // b
                  2, 2, 3, 4, // c
                     1, 3, 4, // d
                        3, 4, // e
                           4, // f
        ];
        UltrametricMatrix::from_upper(7, upper).unwrap()
    }

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const F: usize = 5;

    #[test]
    fn indexing_is_symmetric() {
        let m = example_matrix();
        assert_eq!(m.get(A, C), 4);
        assert_eq!(m.get(C, A), 4);
        assert_eq!(m.get(C, D), 2);
        assert_eq!(m.get(3, 4), 1);
        assert_eq!(m.get(C, F), 3);
        assert_eq!(m.get(A, 6), 2);
        assert_eq!(m.get(4, 4), 0);
    }

    #[test]
    fn example_matrix_is_ultrametric() {
        let m = example_matrix();
        assert!(m.is_ultrametric());
        // c,d,f: 2, 3, 3
        assert_eq!((m.get(C, D), m.get(C, F), m.get(D, F)), (2, 3, 3));
    }

    #[test]
    fn unique_maximum_is_not_ultrametric() {
        let m = UltrametricMatrix::from_upper(3, vec![1, 2, 3]).unwrap();
        assert!(!m.is_ultrametric());
        assert_eq!(m.violating_triple(), Some((0, 1, 2)));
    }

    #[test]
    fn consistency_on_example_matrix() {
        let m = example_matrix();
        assert!(matrix_consistency(
            &m,
            &canonical_topology(A, B, C, F).unwrap()
        ));
        assert!(!matrix_consistency(
            &m,
            &canonical_topology(A, C, B, F).unwrap()
        ));
        // the third pairing of {a,b,c,f}
        assert!(!matrix_consistency(
            &m,
            &canonical_topology(A, F, B, C).unwrap()
        ));
    }

    #[test]
    fn flat_matrix_satisfies_nothing() {
        let m = UltrametricMatrix::filled(6, 3);
        for t in QuartetTopology::all_of([0, 2, 3, 5]).unwrap() {
            assert!(!matrix_consistency(&m, &t));
        }
    }

    #[test]
    fn empty_set_counts_zero() {
        let q = QuartetSet::new(crate::model::TaxonSet::numbered(7), []).unwrap();
        assert_eq!(matrix_satisfied_count(&example_matrix(), &q), 0);
    }

    #[test]
    fn rejects_zero_and_wrong_length() {
        assert!(UltrametricMatrix::from_upper(3, vec![1, 0, 1]).is_err());
        assert!(UltrametricMatrix::from_upper(3, vec![1, 1]).is_err());
    }
}
