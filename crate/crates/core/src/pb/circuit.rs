//! Reified gates and integer comparators over a growing [`PBInstance`].
//!
//! Every builder allocates a fresh output variable and emits constraints
//! that force it to the exact function value in every model.

use super::{Lit, PBConstraint, PBInstance, PbError};

/// One-hot integer: `bits[k-1]` selects value `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryInt {
    pub bits: Vec<Lit>,
}

impl UnaryInt {
    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// `Σ k·bit_k`.
    pub fn value(&self, assignment: &[bool]) -> u32 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, l)| l.eval(assignment))
            .map(|(k, _)| k as u32 + 1)
            .sum()
    }
}

/// Little-endian binary integer: `bits[k]` has weight `2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryInt {
    pub bits: Vec<Lit>,
}

impl BinaryInt {
    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn value(&self, assignment: &[bool]) -> u32 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, l)| l.eval(assignment))
            .map(|(k, _)| 1u32 << k)
            .sum()
    }
}

/// Sequential-counter registers: `regs[k-1] ⟺ x_1 ∨ … ∨ x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRegs {
    pub regs: Vec<Lit>,
}

/// Either a constant or a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signal {
    Const(bool),
    Lit(Lit),
}

impl Signal {
    pub fn eval(self, assignment: &[bool]) -> bool {
        match self {
            Signal::Const(b) => b,
            Signal::Lit(l) => l.eval(assignment),
        }
    }
}

/// Owns an instance under construction.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    inst: PBInstance,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_instance(inst: PBInstance) -> Self {
        Self { inst }
    }

    pub fn fresh(&mut self) -> Lit {
        self.inst.new_var().pos()
    }

    pub fn num_vars(&self) -> u32 {
        self.inst.num_vars()
    }

    pub fn add(&mut self, c: PBConstraint) {
        self.inst.add(c);
    }

    pub fn instance(&self) -> &PBInstance {
        &self.inst
    }

    pub fn instance_mut(&mut self) -> &mut PBInstance {
        &mut self.inst
    }

    pub fn into_instance(self) -> PBInstance {
        self.inst
    }

    pub fn unary_int(&mut self, width: usize) -> UnaryInt {
        UnaryInt {
            bits: (0..width).map(|_| self.fresh()).collect(),
        }
    }

    pub fn binary_int(&mut self, width: usize) -> BinaryInt {
        BinaryInt {
            bits: (0..width).map(|_| self.fresh()).collect(),
        }
    }

    /// `g ⟺ ∧ inputs`, as `Σ a + k·¬g ≥ k` and `g + Σ ¬a ≥ 1`.
    pub fn and_gate(&mut self, inputs: &[Lit]) -> Result<Lit, PbError> {
        if inputs.is_empty() {
            return Err(PbError::EmptyGate);
        }
        let g = self.fresh();
        let k = inputs.len() as i64;
        self.add(PBConstraint::new(
            inputs.iter().map(|&a| (1, a)).chain([(k, !g)]),
            k,
        ));
        self.add(PBConstraint::clause(inputs.iter().map(|&a| !a).chain([g])));
        Ok(g)
    }

    /// `g ⟺ ∨ inputs`, as `Σ l + ¬g ≥ 1` and `Σ ¬l + k·g ≥ k`.
    pub fn or_gate(&mut self, inputs: &[Lit]) -> Result<Lit, PbError> {
        if inputs.is_empty() {
            return Err(PbError::EmptyGate);
        }
        let g = self.fresh();
        let k = inputs.len() as i64;
        self.add(PBConstraint::clause(inputs.iter().copied().chain([!g])));
        self.add(PBConstraint::new(
            inputs.iter().map(|&l| (1, !l)).chain([(k, g)]),
            k,
        ));
        Ok(g)
    }

    /// `g ⟺ (a ⟺ b)`.
    pub fn xnor_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let g = self.fresh();
        self.add(PBConstraint::clause([!g, !a, b]));
        self.add(PBConstraint::clause([!g, a, !b]));
        self.add(PBConstraint::clause([g, a, b]));
        self.add(PBConstraint::clause([g, !a, !b]));
        g
    }

    /// `value(x) = value(y)` on one-hot operands: `∨_k (x_k ∧ y_k)`.
    pub fn eq_unary(&mut self, x: &UnaryInt, y: &UnaryInt) -> Result<Lit, PbError> {
        same_width(x.width(), y.width())?;
        let terms = x
            .bits
            .iter()
            .zip(&y.bits)
            .map(|(&a, &b)| self.and_gate(&[a, b]))
            .collect::<Result<Vec<_>, _>>()?;
        self.or_gate(&terms)
    }

    /// Prefix ORs `P_1 … P_{w−1}` of a one-hot operand, `P_k ⟺ y_1 ∨ … ∨ y_k`.
    /// `P_1` is `y_1` itself; the rest are fresh two-input OR gates.
    pub fn unary_prefix(&mut self, y: &UnaryInt) -> Result<Vec<Lit>, PbError> {
        if y.width() < 2 {
            return Err(PbError::WidthTooSmall(y.width()));
        }
        let mut prefix = vec![y.bits[0]];
        for k in 1..y.width() - 1 {
            let prev = prefix[k - 1];
            prefix.push(self.or_gate(&[prev, y.bits[k]])?);
        }
        Ok(prefix)
    }

    /// `value(x) > value(y)` given the prefix ORs of `y`:
    /// `∨_{k≥2} (x_k ∧ P_{k−1})`.
    pub fn gt_unary_prefixed(&mut self, x: &UnaryInt, y_prefix: &[Lit]) -> Result<Lit, PbError> {
        same_width(x.width(), y_prefix.len() + 1)?;
        let terms = (1..x.width())
            .map(|k| self.and_gate(&[x.bits[k], y_prefix[k - 1]]))
            .collect::<Result<Vec<_>, _>>()?;
        self.or_gate(&terms)
    }

    pub fn gt_unary(&mut self, x: &UnaryInt, y: &UnaryInt) -> Result<Lit, PbError> {
        same_width(x.width(), y.width())?;
        let prefix = self.unary_prefix(y)?;
        self.gt_unary_prefixed(x, &prefix)
    }

    /// At-most-one over a one-hot operand with registers
    /// `s_k ⟺ x_1 ∨ … ∨ x_k`.
    ///
    /// Besides the usual forward clauses (`x_k → s_k`, `s_{k−1} → s_k`,
    /// `x_k → ¬s_{k−1}`) the reverse clauses `s_k → x_k ∨ s_{k−1}` are
    /// emitted, so the registers are fully determined by `x`.
    pub fn seq_counter_at_most_one(&mut self, x: &UnaryInt) -> CounterRegs {
        let regs: Vec<Lit> = (0..x.width()).map(|_| self.fresh()).collect();
        for k in 0..x.width() {
            let (xk, sk) = (x.bits[k], regs[k]);
            self.add(PBConstraint::clause([!xk, sk]));
            if k == 0 {
                self.add(PBConstraint::clause([!sk, xk]));
            } else {
                let prev = regs[k - 1];
                self.add(PBConstraint::clause([!prev, sk]));
                self.add(PBConstraint::clause([!xk, !prev]));
                self.add(PBConstraint::clause([!sk, xk, prev]));
            }
        }
        CounterRegs { regs }
    }

    /// `value(x) < value(y)` from counter registers:
    /// `∨_k (sx_k ∧ ¬sy_k)`.
    pub fn lt_from_counters(&mut self, sx: &CounterRegs, sy: &CounterRegs) -> Result<Lit, PbError> {
        same_width(sx.regs.len(), sy.regs.len())?;
        let terms = sx
            .regs
            .iter()
            .zip(&sy.regs)
            .map(|(&a, &b)| self.and_gate(&[a, !b]))
            .collect::<Result<Vec<_>, _>>()?;
        self.or_gate(&terms)
    }

    /// `value(x) = value(y)` from counter registers: `∧_k XNOR(sx_k, sy_k)`.
    pub fn eq_from_counters(&mut self, sx: &CounterRegs, sy: &CounterRegs) -> Result<Lit, PbError> {
        same_width(sx.regs.len(), sy.regs.len())?;
        let eqs: Vec<Lit> = sx
            .regs
            .iter()
            .zip(&sy.regs)
            .map(|(&a, &b)| self.xnor_gate(a, b))
            .collect();
        self.and_gate(&eqs)
    }

    /// Suffix equalities of two binary operands: entry `k` holds
    /// `∧_{k' ≥ k} XNOR(x_k', y_k')`. Entry 0 is full equality.
    pub fn binary_suffix_eq(&mut self, x: &BinaryInt, y: &BinaryInt) -> Result<Vec<Lit>, PbError> {
        same_width(x.width(), y.width())?;
        if x.width() == 0 {
            return Err(PbError::WidthTooSmall(0));
        }
        let xnors: Vec<Lit> = x
            .bits
            .iter()
            .zip(&y.bits)
            .map(|(&a, &b)| self.xnor_gate(a, b))
            .collect();
        let top = x.width() - 1;
        let mut suffix = vec![xnors[top]; x.width()];
        for k in (0..top).rev() {
            suffix[k] = self.and_gate(&[xnors[k], suffix[k + 1]])?;
        }
        Ok(suffix)
    }

    pub fn eq_binary(&mut self, x: &BinaryInt, y: &BinaryInt) -> Result<Lit, PbError> {
        Ok(self.binary_suffix_eq(x, y)?[0])
    }

    /// `value(x) > value(y)` given suffix equalities from
    /// [`binary_suffix_eq`](Self::binary_suffix_eq):
    /// `∨_k (x_k ∧ ¬y_k ∧ suffix_{k+1})`.
    pub fn gt_binary_with(
        &mut self,
        x: &BinaryInt,
        y: &BinaryInt,
        suffix: &[Lit],
    ) -> Result<Lit, PbError> {
        same_width(x.width(), y.width())?;
        same_width(x.width(), suffix.len())?;
        let top = x.width() - 1;
        let mut terms = Vec::with_capacity(x.width());
        for k in (0..x.width()).rev() {
            let t = if k == top {
                self.and_gate(&[x.bits[k], !y.bits[k]])?
            } else {
                self.and_gate(&[x.bits[k], !y.bits[k], suffix[k + 1]])?
            };
            terms.push(t);
        }
        self.or_gate(&terms)
    }

    pub fn gt_binary(&mut self, x: &BinaryInt, y: &BinaryInt) -> Result<Lit, PbError> {
        let suffix = self.binary_suffix_eq(x, y)?;
        self.gt_binary_with(x, y, &suffix)
    }

    /// `value(x) ≤ c` against the bit pattern of `c`.
    ///
    /// Builds `x > c` as `∨ (x_k ∧ ∧_{k' > k, c_k' = 1} x_k')` over the zero
    /// bits `k` of `c` and returns its negation. Resolves to a constant when
    /// every `x` fits under `c`.
    pub fn le_const(&mut self, x: &BinaryInt, c: i64) -> Result<Signal, PbError> {
        if c < 0 {
            return Err(PbError::NegativeConstant(c));
        }
        let w = x.width();
        if w >= 63 || c >= (1i64 << w) - 1 {
            return Ok(Signal::Const(true));
        }
        let bit = |k: usize| (c >> k) & 1 == 1;
        let mut terms = Vec::new();
        for k in (0..w).rev() {
            if bit(k) {
                continue;
            }
            let mut conj = vec![x.bits[k]];
            conj.extend((k + 1..w).filter(|&j| bit(j)).map(|j| x.bits[j]));
            let t = if conj.len() == 1 {
                conj[0]
            } else {
                self.and_gate(&conj)?
            };
            terms.push(t);
        }
        let gt = if terms.len() == 1 {
            terms[0]
        } else {
            self.or_gate(&terms)?
        };
        Ok(Signal::Lit(!gt))
    }
}

fn same_width(a: usize, b: usize) -> Result<(), PbError> {
    if a == b {
        Ok(())
    } else {
        Err(PbError::WidthMismatch(a, b))
    }
}
