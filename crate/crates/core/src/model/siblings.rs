use super::{canonical_topology, ModelError, QuartetSet};
use crate::binomial;

/// Outcome of the counting test for one taxon pair.
///
/// `p1` counts topologies `[i,j|y1,y2]` (over pairs `y1, y2` of the other
/// taxa) that are absent from the set. `p2` counts triples `{y1,y2,y3}` whose
/// two quartets with `i` and with `j` disagree once `i` and `j` are treated
/// as the same taxon. The pair is a sibling pair when `2·p1 + p2 ≤ n − 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiblingsReport {
    pub pair: (usize, usize),
    pub p1: usize,
    pub p2: usize,
    pub is_sibling: bool,
}

/// Runs the sibling test on every unordered pair, in lexicographic order.
/// Requires a complete quartet set.
pub fn detect_siblings(q: &QuartetSet) -> Result<Vec<SiblingsReport>, ModelError> {
    if !q.is_complete() {
        return Err(ModelError::Incomplete {
            have: q.len(),
            want: binomial(q.n(), 4),
        });
    }
    let n = q.n();
    let mut reports = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            reports.push(pair_report(q, i, j));
        }
    }
    Ok(reports)
}

fn pair_report(q: &QuartetSet, i: usize, j: usize) -> SiblingsReport {
    let n = q.n();
    let others: Vec<usize> = (0..n).filter(|&t| t != i && t != j).collect();
    let topo = |s: [usize; 4]| q.topology_of(s).expect("complete set");

    let mut p1 = 0;
    for (a, &y1) in others.iter().enumerate() {
        for &y2 in &others[a + 1..] {
            let want = canonical_topology(i, j, y1, y2).expect("distinct");
            if topo([i, j, y1, y2]) != want {
                p1 += 1;
            }
        }
    }

    let mut p2 = 0;
    for (a, &y1) in others.iter().enumerate() {
        for (b, &y2) in others.iter().enumerate().skip(a + 1) {
            for &y3 in &others[b + 1..] {
                let with_i = topo([i, y1, y2, y3]);
                let with_j = topo([j, y1, y2, y3]);
                if partner(&with_i.indices(), i) != partner(&with_j.indices(), j) {
                    p2 += 1;
                }
            }
        }
    }

    SiblingsReport {
        pair: (i, j),
        p1,
        p2,
        is_sibling: 2 * p1 + p2 + 3 <= n,
    }
}

/// The taxon paired with `x` in a canonical topology.
fn partner(t: &[usize; 4], x: usize) -> usize {
    let pos = t.iter().position(|&v| v == x).expect("taxon in topology");
    t[pos ^ 1]
}
