//! Exact PB optimizer: DPLL search with counter-based propagation, clause
//! learning and linear objective strengthening.
//!
//! Each constraint `Σ a·l ≥ b` keeps its slack `Σ a over non-false l − b`.
//! A negative slack is a conflict; an unassigned literal whose coefficient
//! exceeds the slack is forced true. Conflicts are explained with the clause
//! made of the constraint's false literals, and analysis learns the first-UIP
//! clause. Each time a full assignment with objective `z` is found, the
//! constraint `objective ≤ z − 1` is added and search resumes from the root;
//! when that becomes unsatisfiable the last assignment is optimal.
//!
//! Branching is deterministic: the lowest-index unassigned variable, first
//! with the polarity that does not increase the objective (false unless the
//! variable has a negative objective coefficient).

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::pb::{Lit, PBConstraint, PBInstance};

#[derive(Clone, Debug, Default)]
pub struct SolverConfig {
    /// Give up with [`SolveStatus::Timeout`] after this long.
    pub time_limit: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Unsatisfiable,
    /// Time budget exhausted; the result carries the best assignment so far.
    Timeout,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub solutions: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub assignment: Option<Vec<bool>>,
    pub objective: Option<i64>,
    pub stats: SolveStats,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("assignment covers {got} of {want} variables")]
    PartialAssignment { got: usize, want: usize },
}

/// Result of [`check_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelCheck {
    Satisfied,
    Violated { constraint: usize },
}

impl ModelCheck {
    pub fn is_satisfied(self) -> bool {
        self == ModelCheck::Satisfied
    }
}

/// Checks a total assignment against every constraint.
pub fn check_model(inst: &PBInstance, assignment: &[bool]) -> Result<ModelCheck, SolverError> {
    let want = inst.num_vars() as usize;
    if assignment.len() < want {
        return Err(SolverError::PartialAssignment {
            got: assignment.len(),
            want,
        });
    }
    Ok(match inst.first_violated(assignment) {
        None => ModelCheck::Satisfied,
        Some(constraint) => ModelCheck::Violated { constraint },
    })
}

pub fn solve(inst: &PBInstance, config: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let mut engine = Engine::new(inst);
    let mut best: Option<(Vec<bool>, i64)> = None;
    let status = engine.run(inst, config, start, &mut best);
    engine.stats.elapsed = start.elapsed();
    let (assignment, objective) = match best {
        Some((a, z)) if status != SolveStatus::Unsatisfiable => (Some(a), Some(z)),
        _ => (None, None),
    };
    SolveResult {
        status,
        assignment,
        objective,
        stats: engine.stats,
    }
}

const NO_REASON: u32 = u32::MAX;

struct Constr {
    /// Sorted by descending coefficient so propagation can stop early.
    terms: Vec<(i64, Lit)>,
    slack: i64,
}

struct Engine {
    constrs: Vec<Constr>,
    /// Per literal code: constraints containing that literal, with coefficient.
    occurs: Vec<Vec<(u32, i64)>>,
    /// Per variable slot: 0 false, 1 true, -1 unassigned.
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    position: Vec<u32>,
    trail: Vec<Lit>,
    limits: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    prefer_true: Vec<bool>,
    hint: usize,
    stats: SolveStats,
}

enum Added {
    Ok,
    Conflict,
}

impl Engine {
    fn new(inst: &PBInstance) -> Self {
        let n = inst.num_vars() as usize;
        let mut prefer_true = vec![false; n];
        for &(c, v) in inst.objective() {
            prefer_true[v.slot()] = c < 0;
        }
        Self {
            constrs: Vec::new(),
            occurs: vec![Vec::new(); 2 * n + 2],
            value: vec![-1; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            position: vec![0; n],
            trail: Vec::with_capacity(n),
            limits: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            prefer_true,
            hint: 0,
            stats: SolveStats::default(),
        }
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        match self.value[l.var().slot()] {
            -1 => None,
            v => Some((v == 1) != l.is_negated()),
        }
    }

    fn is_false(&self, l: Lit) -> bool {
        self.lit_value(l) == Some(false)
    }

    fn decision_level(&self) -> u32 {
        self.limits.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let s = l.var().slot();
        debug_assert_eq!(self.value[s], -1);
        self.value[s] = i8::from(!l.is_negated());
        self.level[s] = self.decision_level();
        self.reason[s] = reason;
        self.position[s] = self.trail.len() as u32;
        self.trail.push(l);
    }

    /// Adds a constraint while every assigned literal has been processed.
    fn add_constraint(&mut self, c: &PBConstraint) -> Added {
        debug_assert_eq!(self.qhead, self.trail.len());
        let mut terms: Vec<(i64, Lit)> = c.terms().to_vec();
        terms.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let slack = terms
            .iter()
            .filter(|(_, l)| !self.is_false(*l))
            .map(|(a, _)| a)
            .sum::<i64>()
            - c.bound();
        let idx = self.constrs.len() as u32;
        for &(a, l) in &terms {
            self.occurs[l.code()].push((idx, a));
        }
        self.constrs.push(Constr { terms, slack });
        if slack < 0 {
            return Added::Conflict;
        }
        self.scan(idx);
        Added::Ok
    }

    /// Forces every unassigned literal whose coefficient exceeds the slack.
    fn scan(&mut self, c: u32) {
        let slack = self.constrs[c as usize].slack;
        let mut k = 0;
        while k < self.constrs[c as usize].terms.len() {
            let (a, l) = self.constrs[c as usize].terms[k];
            if a <= slack {
                break;
            }
            if self.lit_value(l).is_none() {
                self.enqueue(l, c);
            }
            k += 1;
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let falsified = (!p).code();
            let occ = std::mem::take(&mut self.occurs[falsified]);
            for &(c, a) in &occ {
                self.constrs[c as usize].slack -= a;
            }
            let mut conflict = None;
            for &(c, _) in &occ {
                if self.constrs[c as usize].slack < 0 {
                    conflict = Some(c);
                    break;
                }
                self.scan(c);
            }
            self.occurs[falsified] = occ;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.limits[level as usize];
        while self.trail.len() > keep {
            let p = self.trail.pop().unwrap();
            if self.trail.len() < self.qhead {
                for &(c, a) in &self.occurs[(!p).code()] {
                    self.constrs[c as usize].slack += a;
                }
            }
            let s = p.var().slot();
            self.value[s] = -1;
            self.reason[s] = NO_REASON;
            self.hint = self.hint.min(s);
        }
        self.qhead = self.trail.len();
        self.limits.truncate(level as usize);
    }

    /// False literals of `c` assigned strictly before trail position `before`.
    fn explanation(&self, c: u32, before: usize, out: &mut Vec<Lit>) {
        out.clear();
        for &(_, l) in &self.constrs[c as usize].terms {
            if self.is_false(l) && (self.position[l.var().slot()] as usize) < before {
                out.push(l);
            }
        }
    }

    /// First-UIP learning. Returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, conflict: u32) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![Lit::placeholder()];
        let mut pending = 0usize;
        let mut lits = Vec::new();
        self.explanation(conflict, self.qhead, &mut lits);
        let mut index = self.trail.len();
        let uip = loop {
            for &q in &lits {
                let s = q.var().slot();
                if self.seen[s] || self.level[s] == 0 {
                    continue;
                }
                self.seen[s] = true;
                if self.level[s] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().slot()] {
                    break;
                }
            }
            let p = self.trail[index];
            let s = p.var().slot();
            self.seen[s] = false;
            pending -= 1;
            if pending == 0 {
                break p;
            }
            let r = self.reason[s];
            debug_assert_ne!(r, NO_REASON, "only the decision has no reason");
            self.explanation(r, self.position[s] as usize, &mut lits);
        };
        learnt[0] = !uip;
        for l in &learnt[1..] {
            self.seen[l.var().slot()] = false;
        }
        // deepest other literal goes second
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut deepest = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().slot()] > self.level[learnt[deepest].var().slot()] {
                    deepest = k;
                }
            }
            learnt.swap(1, deepest);
            bt = self.level[learnt[1].var().slot()];
        }
        (learnt, bt)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while self.hint < self.value.len() {
            if self.value[self.hint] == -1 {
                let v = crate::pb::Var::new(self.hint as u32 + 1);
                return Some(if self.prefer_true[self.hint] {
                    v.pos()
                } else {
                    v.neg()
                });
            }
            self.hint += 1;
        }
        None
    }

    fn snapshot(&self) -> Vec<bool> {
        self.value.iter().map(|&v| v == 1).collect()
    }

    fn run(
        &mut self,
        inst: &PBInstance,
        config: &SolverConfig,
        start: Instant,
        best: &mut Option<(Vec<bool>, i64)>,
    ) -> SolveStatus {
        for c in inst.constraints() {
            if let Added::Conflict = self.add_constraint(c) {
                return SolveStatus::Unsatisfiable;
            }
            if self.propagate().is_some() {
                return SolveStatus::Unsatisfiable;
            }
        }
        let mut ticks = 0u32;
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    return self.exhausted(best);
                }
                let (learnt, bt) = self.analyze(conflict);
                self.backtrack(bt);
                let clause = PBConstraint::clause(learnt.iter().copied());
                let idx = self.constrs.len() as u32;
                match self.add_constraint(&clause) {
                    Added::Conflict => return self.exhausted(best),
                    Added::Ok => {
                        // the asserting literal is forced by the new clause
                        if self.lit_value(learnt[0]).is_none() {
                            self.enqueue(learnt[0], idx);
                        }
                    }
                }
                continue;
            }

            ticks += 1;
            if ticks.is_multiple_of(1024) {
                if let Some(limit) = config.time_limit {
                    if start.elapsed() >= limit {
                        return SolveStatus::Timeout;
                    }
                }
            }

            match self.pick_branch() {
                Some(l) => {
                    self.stats.decisions += 1;
                    self.limits.push(self.trail.len());
                    self.enqueue(l, NO_REASON);
                }
                None => {
                    let assignment = self.snapshot();
                    let z = inst.objective_value(&assignment);
                    self.stats.solutions += 1;
                    *best = Some((assignment, z));
                    if inst.objective().is_empty() {
                        return SolveStatus::Optimal;
                    }
                    self.backtrack(0);
                    // Σ c·x ≤ z − 1
                    let bound = PBConstraint::new(
                        inst.objective().iter().map(|&(c, v)| (-c, v.pos())),
                        1 - z,
                    );
                    if let Added::Conflict = self.add_constraint(&bound) {
                        return SolveStatus::Optimal;
                    }
                }
            }
        }
    }

    fn exhausted(&self, best: &Option<(Vec<bool>, i64)>) -> SolveStatus {
        if best.is_some() {
            SolveStatus::Optimal
        } else {
            SolveStatus::Unsatisfiable
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pb::Var;

    #[test]
    fn tiny_optimum() {
        let mut inst = PBInstance::new();
        let a = inst.new_var();
        let b = inst.new_var();
        inst.add(PBConstraint::clause([a.pos(), b.pos()]));
        inst.set_objective([(-1, a)]);
        let r = solve(&inst, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(-1));
        let asg = r.assignment.unwrap();
        assert!(asg[0]);
        assert!(check_model(&inst, &asg).unwrap().is_satisfied());
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut inst = PBInstance::new();
        let a = inst.new_var();
        inst.add(PBConstraint::clause([a.pos()]));
        inst.add(PBConstraint::new([(-1, a.pos())], 0));
        let r = solve(&inst, &SolverConfig::default());
        assert_eq!(r.status, SolveStatus::Unsatisfiable);
        assert!(r.assignment.is_none());
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        let mut inst = PBInstance::new();
        let p: Vec<Vec<Var>> = (0..3)
            .map(|_| (0..2).map(|_| inst.new_var()).collect())
            .collect();
        for row in &p {
            inst.add(PBConstraint::at_least(row.iter().map(|v| v.pos()), 1));
        }
        for h in 0..2 {
            inst.add(PBConstraint::at_most(p.iter().map(|row| row[h].pos()), 1));
        }
        assert_eq!(
            solve(&inst, &SolverConfig::default()).status,
            SolveStatus::Unsatisfiable
        );
    }

    #[test]
    fn check_model_reports_violation() {
        let mut inst = PBInstance::new();
        let a = inst.new_var();
        let b = inst.new_var();
        inst.add(PBConstraint::clause([a.pos()]));
        inst.add(PBConstraint::clause([b.pos()]));
        assert_eq!(
            check_model(&inst, &[true, false]).unwrap(),
            ModelCheck::Violated { constraint: 1 }
        );
        assert_eq!(
            check_model(&inst, &[true]),
            Err(SolverError::PartialAssignment { got: 1, want: 2 })
        );
    }

    #[test]
    fn weighted_knapsack_style() {
        // max 3a + 4b + 5c  s.t. 2a + 3b + 4c <= 5
        let mut inst = PBInstance::new();
        let v: Vec<Var> = (0..3).map(|_| inst.new_var()).collect();
        inst.add(PBConstraint::new(
            [(-2, v[0].pos()), (-3, v[1].pos()), (-4, v[2].pos())],
            -5,
        ));
        inst.set_objective([(-3, v[0]), (-4, v[1]), (-5, v[2])]);
        let r = solve(&inst, &SolverConfig::default());
        assert_eq!(r.objective, Some(-7));
    }
}
