//! Pseudo-Boolean constraints, reified circuit builders and OPB files.

mod circuit;
pub mod opb;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Not;

use thiserror::Error;

pub use circuit::{BinaryInt, CircuitBuilder, CounterRegs, Signal, UnaryInt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PbError {
    #[error("gate needs at least one input")]
    EmptyGate,
    #[error("operand widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
    #[error("operand width {0} is too small")]
    WidthTooSmall(usize),
    #[error("constant {0} must be non-negative")]
    NegativeConstant(i64),
}

/// Boolean variable, indexed densely from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Self {
        assert!(index > 0, "variables are 1-based");
        Self(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// 0-based position into assignment slices.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }
}

/// A variable with a polarity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense code `2·var + negated`, handy for literal-indexed tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().slot()] != self.is_negated()
    }

    /// Dummy literal for slots filled in later.
    pub(crate) fn placeholder() -> Lit {
        Lit(0)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "-x{}", self.var().0)
        } else {
            write!(f, "x{}", self.var().0)
        }
    }
}

/// `Σ coef·lit ≥ bound` in normal form: coefficients positive, one term per
/// variable, terms sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PBConstraint {
    terms: Vec<(i64, Lit)>,
    bound: i64,
}

impl PBConstraint {
    /// Normalizes arbitrary integer terms into the canonical `≥` form.
    pub fn new<I>(terms: I, bound: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Lit)>,
    {
        // signed coefficient on the positive literal, per variable
        let mut acc: BTreeMap<Var, i64> = BTreeMap::new();
        let mut bound = bound;
        for (c, l) in terms {
            if l.is_negated() {
                // c·¬x = c − c·x
                bound -= c;
                *acc.entry(l.var()).or_default() -= c;
            } else {
                *acc.entry(l.var()).or_default() += c;
            }
        }
        let mut out = Vec::with_capacity(acc.len());
        for (v, c) in acc {
            match c.cmp(&0) {
                std::cmp::Ordering::Greater => out.push((c, v.pos())),
                std::cmp::Ordering::Less => {
                    // c·x = c + |c|·¬x
                    bound -= c;
                    out.push((-c, v.neg()));
                }
                std::cmp::Ordering::Equal => {}
            }
        }
        Self { terms: out, bound }
    }

    /// `Σ lits ≥ 1`.
    pub fn clause<I: IntoIterator<Item = Lit>>(lits: I) -> Self {
        Self::at_least(lits, 1)
    }

    /// `Σ lits ≥ k`.
    pub fn at_least<I: IntoIterator<Item = Lit>>(lits: I, k: i64) -> Self {
        Self::new(lits.into_iter().map(|l| (1, l)), k)
    }

    /// `Σ lits ≤ k`, stored as `Σ ¬lits ≥ len − k`.
    pub fn at_most<I: IntoIterator<Item = Lit>>(lits: I, k: i64) -> Self {
        let lits: Vec<Lit> = lits.into_iter().collect();
        let len = lits.len() as i64;
        Self::at_least(lits.into_iter().map(|l| !l), len - k)
    }

    pub fn terms(&self) -> &[(i64, Lit)] {
        &self.terms
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn lhs(&self, assignment: &[bool]) -> i64 {
        self.terms
            .iter()
            .filter(|(_, l)| l.eval(assignment))
            .map(|(c, _)| c)
            .sum()
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        self.lhs(assignment) >= self.bound
    }

    pub fn max_var(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, l)| l.var().index())
            .max()
            .unwrap_or(0)
    }
}

/// Variables, normalized constraints, and a linear objective to minimize.
///
/// The objective is a list of signed coefficients on (positive) variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PBInstance {
    num_vars: u32,
    constraints: Vec<PBConstraint>,
    objective: Vec<(i64, Var)>,
}

impl PBInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Allocates the next variable.
    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars)
    }

    /// Raises the variable count to at least `n`.
    pub fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add(&mut self, c: PBConstraint) {
        self.num_vars = self.num_vars.max(c.max_var());
        self.constraints.push(c);
    }

    pub fn constraints(&self) -> &[PBConstraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Replaces the objective, merging duplicate variables and dropping zeros.
    pub fn set_objective<I: IntoIterator<Item = (i64, Var)>>(&mut self, terms: I) {
        let mut acc: BTreeMap<Var, i64> = BTreeMap::new();
        for (c, v) in terms {
            *acc.entry(v).or_default() += c;
            self.num_vars = self.num_vars.max(v.index());
        }
        self.objective = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(v, c)| (c, v))
            .collect();
    }

    pub fn objective(&self) -> &[(i64, Var)] {
        &self.objective
    }

    pub fn objective_value(&self, assignment: &[bool]) -> i64 {
        self.objective
            .iter()
            .filter(|(_, v)| assignment[v.slot()])
            .map(|(c, _)| c)
            .sum()
    }

    /// Index of the first violated constraint, if any.
    pub fn first_violated(&self, assignment: &[bool]) -> Option<usize> {
        self.constraints
            .iter()
            .position(|c| !c.is_satisfied(assignment))
    }
}
