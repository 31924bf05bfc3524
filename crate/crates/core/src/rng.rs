//! Fully specified 64-bit LCG so generated instances are reproducible in any
//! language.
//!
//! `state' = state * 6364136223846793005 + 1442695040888963407`; each draw
//! advances the state and returns its high 32 bits. The initial state is the
//! seed itself. Ranged draws use `next_u32() % bound`.

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform-ish draw in `0..bound`. Panics when `bound == 0`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        assert!(bound <= u32::MAX as usize, "range too large");
        (self.next_u32() % bound as u32) as usize
    }
}
