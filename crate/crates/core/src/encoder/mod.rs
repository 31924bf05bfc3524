//! MQC as pseudo-Boolean optimization.
//!
//! One integer `M(i,j)` in `1..=⌈n/2⌉` per taxon pair. Every triple must
//! have two equal entries strictly above the third (the matrix is a strict
//! ultrametric), and `q_t` holds exactly when topology `t = [i,j|l,m]` is
//! consistent with the matrix:
//!
//! ```text
//! q_t ⟺ (M(i,l) > M(i,j) ∧ M(j,m) > M(i,j)) ∨ (M(i,l) > M(l,m) ∧ M(j,m) > M(l,m))
//! ```
//!
//! The objective minimizes `Σ −q_t`. The three encodings differ only in how
//! `M(i,j)` and its comparators are represented:
//! - [`Encoding::Basic`]: one-hot selection bits, prefix-OR comparators
//! - [`Encoding::Fst`]: one-hot bits whose at-most-one is a sequential
//!   counter; comparators read the counter registers
//! - [`Encoding::Scd`]: little-endian binary digits with an upper bound

mod varmap;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use varmap::{Pair, Role, VarMap};

use crate::model::{detect_siblings, ModelError, QuartetSet, SiblingsReport, UltrametricMatrix};
use crate::pb::{
    BinaryInt, CircuitBuilder, CounterRegs, Lit, PBConstraint, PBInstance, PbError, Signal,
    UnaryInt,
};
use varmap::pair_index;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("need at least 4 taxa, got {0}")]
    TooFewTaxa(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pb(#[from] PbError),
    #[error("unknown encoding `{0}` (expected basic, fst or scd)")]
    UnknownEncoding(String),
    #[error("pair ({0}, {1}) is not a pair of distinct taxa of this encoding")]
    PairOutOfRange(usize, usize),
    #[error("assignment covers {got} of {want} variables")]
    ShortAssignment { got: usize, want: usize },
    #[error("entry ({i}, {j}) has no valid value: {reason}")]
    BadEntry { i: usize, j: usize, reason: String },
    #[error("map line {line}: {message}")]
    MapSyntax { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    Basic,
    Fst,
    Scd,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::Basic, Encoding::Fst, Encoding::Scd];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Basic => "basic",
            Encoding::Fst => "fst",
            Encoding::Scd => "scd",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| EncodeError::UnknownEncoding(s.to_string()))
    }
}

/// An encoding, optionally with sibling pairs fixed to the lowest value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelVariant {
    pub encoding: Encoding,
    pub siblings: bool,
}

impl ModelVariant {
    pub fn new(encoding: Encoding, siblings: bool) -> Self {
        Self { encoding, siblings }
    }

    /// All six combinations.
    pub fn all() -> impl Iterator<Item = ModelVariant> {
        Encoding::ALL
            .into_iter()
            .flat_map(|e| [false, true].map(move |s| ModelVariant::new(e, s)))
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.siblings {
            write!(f, "{}+siblings", self.encoding)
        } else {
            write!(f, "{}", self.encoding)
        }
    }
}

/// Largest matrix entry needed for `n` taxa: `⌈n/2⌉`.
pub fn upper_limit(n: usize) -> u32 {
    n.div_ceil(2) as u32
}

/// Bits per entry in the binary encoding: `⌊log2 ⌈n/2⌉⌋ + 1`.
pub fn binary_width(n: usize) -> usize {
    (upper_limit(n).ilog2() + 1) as usize
}

/// Builds the instance and its variable map. With `variant.siblings` the
/// quartet set must be complete.
pub fn encode(q: &QuartetSet, variant: ModelVariant) -> Result<(PBInstance, VarMap), EncodeError> {
    let n = q.n();
    if n < 4 {
        return Err(EncodeError::TooFewTaxa(n));
    }
    let mut enc = Encoder::new(n, variant.encoding);
    enc.entries()?;
    enc.triples()?;
    let d = enc.topologies(q)?;
    let mut quartets = Vec::with_capacity(d.len());
    for (t, (d1, d2)) in d.into_iter().enumerate() {
        quartets.push(enc.b.or_gate(&[d1, d2])?);
        enc.tag(Role::Quartet { topology: t });
    }
    let mut inst = enc.b.into_instance();
    inst.set_objective(quartets.iter().map(|l| (-1, l.var())));
    let mut map = VarMap {
        variant,
        taxa: q.taxa().clone(),
        upper: upper_limit(n),
        pairs: enc.pairs,
        quartets,
        roles: enc.roles,
        fixed: Vec::new(),
    };
    if variant.siblings {
        let reports = detect_siblings(q)?;
        map.fixed = apply_siblings(&mut inst, &map, &reports)?;
    }
    Ok((inst, map))
}

/// Fixes `M(i,j) = 1` for every flagged sibling pair that shares no taxon
/// with a pair fixed before it (in report order). Returns the fixed pairs.
pub fn apply_siblings(
    inst: &mut PBInstance,
    map: &VarMap,
    reports: &[SiblingsReport],
) -> Result<Vec<Pair>, EncodeError> {
    let mut used = vec![false; map.n()];
    let mut fixed = Vec::new();
    for r in reports.iter().filter(|r| r.is_sibling) {
        let (i, j) = r.pair;
        let lits = map
            .pair_lits(i, j)
            .ok_or(EncodeError::PairOutOfRange(i, j))?
            .to_vec();
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        // unary: bit for value 1; binary: bit of weight 1
        inst.add(PBConstraint::clause([lits[0]]));
        for &l in &lits[1..] {
            inst.add(PBConstraint::clause([!l]));
        }
        fixed.push((i.min(j), i.max(j)));
    }
    Ok(fixed)
}

/// Reads the matrix and the per-topology `q_t` values off an assignment.
pub fn decode_assignment(
    map: &VarMap,
    assignment: &[bool],
) -> Result<(UltrametricMatrix, Vec<bool>), EncodeError> {
    let want = map.num_vars() as usize;
    if assignment.len() < want {
        return Err(EncodeError::ShortAssignment {
            got: assignment.len(),
            want,
        });
    }
    let n = map.n();
    let mut m = UltrametricMatrix::filled(n, 1);
    for i in 0..n {
        for j in i + 1..n {
            let lits = &map.pairs[pair_index(n, i, j)];
            let value = match map.variant.encoding {
                Encoding::Basic | Encoding::Fst => {
                    let on: Vec<usize> = (0..lits.len())
                        .filter(|&k| lits[k].eval(assignment))
                        .collect();
                    if on.len() != 1 {
                        let reason = format!("{} selection bits set", on.len());
                        return Err(EncodeError::BadEntry { i, j, reason });
                    }
                    on[0] as u32 + 1
                }
                Encoding::Scd => BinaryInt { bits: lits.clone() }.value(assignment),
            };
            if value == 0 || value > map.upper {
                let reason = format!("value {value} outside 1..={}", map.upper);
                return Err(EncodeError::BadEntry { i, j, reason });
            }
            m.set(i, j, value)?;
        }
    }
    let flags = map.quartets.iter().map(|l| l.eval(assignment)).collect();
    Ok((m, flags))
}

enum Repr {
    Unary { x: UnaryInt, prefix: Vec<Lit> },
    Counted { regs: CounterRegs },
    Binary { x: BinaryInt },
}

struct Encoder {
    n: usize,
    encoding: Encoding,
    b: CircuitBuilder,
    roles: Vec<Role>,
    pairs: Vec<Vec<Lit>>,
    reprs: Vec<Repr>,
    eq_memo: HashMap<(usize, usize), Lit>,
    gt_memo: HashMap<(usize, usize), Lit>,
    suffix_memo: HashMap<(usize, usize), Vec<Lit>>,
}

impl Encoder {
    fn new(n: usize, encoding: Encoding) -> Self {
        Self {
            n,
            encoding,
            b: CircuitBuilder::new(),
            roles: Vec::new(),
            pairs: Vec::new(),
            reprs: Vec::new(),
            eq_memo: HashMap::new(),
            gt_memo: HashMap::new(),
            suffix_memo: HashMap::new(),
        }
    }

    /// Gives every variable allocated since the last call the role `role`.
    fn tag(&mut self, role: Role) {
        let total = self.b.num_vars() as usize;
        self.roles.resize(total, role);
    }

    fn pair_list(&self) -> Vec<Pair> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        pair_index(self.n, i.min(j), i.max(j))
    }

    fn pair_of(&self, idx: usize) -> Pair {
        self.pair_list()[idx]
    }

    /// Entry variables for every pair, then the per-pair auxiliaries.
    fn entries(&mut self) -> Result<(), EncodeError> {
        let upper = upper_limit(self.n) as usize;
        let width = binary_width(self.n);
        let pairs = self.pair_list();
        for &pair in &pairs {
            match self.encoding {
                Encoding::Basic | Encoding::Fst => {
                    let x = self.b.unary_int(upper);
                    for (k, &l) in x.bits.iter().enumerate() {
                        self.roles.push(Role::Select {
                            pair,
                            value: k as u32 + 1,
                        });
                        debug_assert_eq!(l.var().slot() + 1, self.roles.len());
                    }
                    self.pairs.push(x.bits);
                }
                Encoding::Scd => {
                    let x = self.b.binary_int(width);
                    for k in 0..width {
                        self.roles.push(Role::Bit {
                            pair,
                            bit: k as u32,
                        });
                    }
                    self.pairs.push(x.bits);
                }
            }
        }
        for (p, &pair) in pairs.iter().enumerate() {
            let bits = self.pairs[p].clone();
            self.b.add(PBConstraint::clause(bits.iter().copied()));
            let repr = match self.encoding {
                Encoding::Basic => {
                    self.b.add(PBConstraint::at_most(bits.iter().copied(), 1));
                    let x = UnaryInt { bits };
                    let prefix = self.b.unary_prefix(&x)?;
                    self.tag(Role::Prefix { pair });
                    Repr::Unary { x, prefix }
                }
                Encoding::Fst => {
                    let x = UnaryInt { bits };
                    let regs = self.b.seq_counter_at_most_one(&x);
                    for (k, r) in regs.regs.iter().enumerate() {
                        debug_assert_eq!(r.var().slot(), self.roles.len());
                        self.roles.push(Role::Counter {
                            pair,
                            reg: k as u32 + 1,
                        });
                    }
                    Repr::Counted { regs }
                }
                Encoding::Scd => {
                    let x = BinaryInt { bits };
                    match self.b.le_const(&x, upper as i64)? {
                        Signal::Const(true) => {}
                        Signal::Const(false) => unreachable!("upper bound is positive"),
                        Signal::Lit(l) => self.b.add(PBConstraint::clause([l])),
                    }
                    self.tag(Role::Bound { pair });
                    Repr::Binary { x }
                }
            };
            self.reprs.push(repr);
        }
        Ok(())
    }

    fn eq(&mut self, a: usize, b: usize) -> Result<Lit, EncodeError> {
        let key = (a.min(b), a.max(b));
        if let Some(&l) = self.eq_memo.get(&key) {
            return Ok(l);
        }
        let (x, y) = key;
        let l = match (&self.reprs[x], &self.reprs[y]) {
            (Repr::Unary { x: ux, .. }, Repr::Unary { x: uy, .. }) => {
                let (ux, uy) = (ux.clone(), uy.clone());
                self.b.eq_unary(&ux, &uy)?
            }
            (Repr::Counted { regs: sx, .. }, Repr::Counted { regs: sy, .. }) => {
                let (sx, sy) = (sx.clone(), sy.clone());
                self.b.eq_from_counters(&sx, &sy)?
            }
            (Repr::Binary { .. }, Repr::Binary { .. }) => self.suffix(x, y)?[0],
            _ => unreachable!("one encoding per instance"),
        };
        self.tag(Role::Equal {
            a: self.pair_of(x),
            b: self.pair_of(y),
        });
        self.eq_memo.insert(key, l);
        Ok(l)
    }

    /// Shared suffix-equality chain of two binary entries, `a < b`.
    fn suffix(&mut self, a: usize, b: usize) -> Result<Vec<Lit>, EncodeError> {
        if let Some(s) = self.suffix_memo.get(&(a, b)) {
            return Ok(s.clone());
        }
        let (Repr::Binary { x }, Repr::Binary { x: y }) = (&self.reprs[a], &self.reprs[b]) else {
            unreachable!("binary entries only")
        };
        let (x, y) = (x.clone(), y.clone());
        let s = self.b.binary_suffix_eq(&x, &y)?;
        self.tag(Role::Equal {
            a: self.pair_of(a),
            b: self.pair_of(b),
        });
        self.suffix_memo.insert((a, b), s.clone());
        Ok(s)
    }

    /// `M(a) > M(b)`.
    fn gt(&mut self, a: usize, b: usize) -> Result<Lit, EncodeError> {
        if let Some(&l) = self.gt_memo.get(&(a, b)) {
            return Ok(l);
        }
        let l = match (&self.reprs[a], &self.reprs[b]) {
            (Repr::Unary { x, .. }, Repr::Unary { prefix, .. }) => {
                let (x, prefix) = (x.clone(), prefix.clone());
                self.b.gt_unary_prefixed(&x, &prefix)?
            }
            (Repr::Counted { regs: sx, .. }, Repr::Counted { regs: sy, .. }) => {
                // x > y ⟺ y < x
                let (sx, sy) = (sx.clone(), sy.clone());
                self.b.lt_from_counters(&sy, &sx)?
            }
            (Repr::Binary { x }, Repr::Binary { x: y }) => {
                let (x, y) = (x.clone(), y.clone());
                let suffix = self.suffix(a.min(b), a.max(b))?;
                self.b.gt_binary_with(&x, &y, &suffix)?
            }
            _ => unreachable!("one encoding per instance"),
        };
        self.tag(Role::Greater {
            a: self.pair_of(a),
            b: self.pair_of(b),
        });
        self.gt_memo.insert((a, b), l);
        Ok(l)
    }

    fn and(&mut self, a: Lit, b: Lit, role: Role) -> Result<Lit, EncodeError> {
        let g = self.b.and_gate(&[a, b])?;
        self.tag(role);
        Ok(g)
    }

    /// Every triple `i < j < l` has two equal entries above the third:
    /// - `c1`: `M(i,j) = M(i,l) > M(j,l)`
    /// - `c2`: `M(i,j) = M(j,l) > M(i,l)`
    /// - `c3`: `M(j,l) = M(i,l) > M(i,j)`
    fn triples(&mut self) -> Result<(), EncodeError> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let (ij, il, jl) = (self.idx(i, j), self.idx(i, l), self.idx(j, l));
                    let triple = (i, j, l);
                    if self.encoding == Encoding::Fst {
                        // every ordered pair of entries sharing a taxon, so
                        // the size does not depend on the quartet set
                        for (a, b) in [(ij, il), (il, ij), (ij, jl), (jl, ij), (il, jl), (jl, il)] {
                            self.gt(a, b)?;
                        }
                    }
                    let e = self.eq(ij, il)?;
                    let g = self.gt(il, jl)?;
                    let c1 = self.and(e, g, Role::Coverage { triple, case: 1 })?;
                    let e = self.eq(ij, jl)?;
                    let g = self.gt(jl, il)?;
                    let c2 = self.and(e, g, Role::Coverage { triple, case: 2 })?;
                    let e = self.eq(jl, il)?;
                    let g = self.gt(il, ij)?;
                    let c3 = self.and(e, g, Role::Coverage { triple, case: 3 })?;
                    self.b.add(PBConstraint::clause([c1, c2, c3]));
                }
            }
        }
        Ok(())
    }

    /// `(d1, d2)` per topology `[i,j|l,m]`:
    /// - `d1`: `M(i,l) > M(i,j) ∧ M(j,m) > M(i,j)`
    /// - `d2`: `M(i,l) > M(l,m) ∧ M(j,m) > M(l,m)`
    fn topologies(&mut self, q: &QuartetSet) -> Result<Vec<(Lit, Lit)>, EncodeError> {
        let mut out = Vec::with_capacity(q.len());
        for (t, top) in q.iter().enumerate() {
            let [i, j, l, m] = top.indices();
            let (il, ij, jm, lm) = (
                self.idx(i, l),
                self.idx(i, j),
                self.idx(j, m),
                self.idx(l, m),
            );
            let a = self.gt(il, ij)?;
            let b = self.gt(jm, ij)?;
            let d1 = self.and(
                a,
                b,
                Role::Consistency {
                    topology: t,
                    case: 1,
                },
            )?;
            let a = self.gt(il, lm)?;
            let b = self.gt(jm, lm)?;
            let d2 = self.and(
                a,
                b,
                Role::Consistency {
                    topology: t,
                    case: 2,
                },
            )?;
            out.push((d1, d2));
        }
        Ok(out)
    }
}
