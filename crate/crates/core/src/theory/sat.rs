//! Conflict-driven clause learning over the clause database, with a
//! linear-arithmetic check of the asserted atoms after each propagation.
//! Rational conflicts are explained by an infeasible subset of the atoms.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::linear::{Atom, Encoding, Lit};
use super::simplex::{infeasible_subset, solve_integer, Constraint};
use super::{Budget, TheoryError};

pub struct Model {
    pub props: Vec<Option<bool>>,
    pub ints: Vec<BigInt>,
}

fn var(l: Lit) -> usize {
    l.unsigned_abs() as usize
}

/// Index of a literal in the watch lists.
fn code(l: Lit) -> usize {
    2 * var(l) + usize::from(l < 0)
}

fn constraint(atom: &Atom, value: bool) -> Constraint {
    if value {
        Constraint {
            coeffs: atom.coeffs.clone(),
            bound: atom.bound.clone(),
            upper: true,
        }
    } else {
        Constraint {
            coeffs: atom.coeffs.clone(),
            bound: &atom.bound + BigInt::one(),
            upper: false,
        }
    }
}

fn holds(c: &Constraint, point: &[BigInt]) -> bool {
    let mut sum = BigInt::from(0);
    for (v, a) in &c.coeffs {
        sum += a * &point[*v];
    }
    if c.upper {
        sum <= c.bound
    } else {
        sum >= c.bound
    }
}

enum Conflict {
    Clause(usize),
    Lits(Vec<Lit>),
}

struct Solver<'a> {
    enc: &'a Encoding,
    clauses: Vec<Vec<Lit>>,
    /// Original clauses; learned ones follow.
    original: usize,
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    /// Trail length at the start of each decision level.
    limits: Vec<usize>,
    qhead: usize,
    /// Integer model known to satisfy the atoms asserted when it was found.
    cached: Option<Vec<BigInt>>,
    budget: &'a mut Budget,
}

impl<'a> Solver<'a> {
    fn value(&self, l: Lit) -> Option<bool> {
        self.assign[var(l)].map(|b| b == (l > 0))
    }

    fn decision_level(&self) -> usize {
        self.limits.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var(l);
        self.assign[v] = Some(l > 0);
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Add a clause of two or more literals and watch its first two.
    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        self.watches[code(c[0])].push(i);
        self.watches[code(c[1])].push(i);
        self.clauses.push(c);
        i
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = -p;
            let mut ws = core::mem::take(&mut self.watches[code(falsified)]);
            let mut keep = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut k = 0;
            while k < ws.len() {
                let ci = ws[k];
                k += 1;
                if conflict.is_some() {
                    keep.push(ci);
                    continue;
                }
                let c = &mut self.clauses[ci];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.assign[var(first)].map(|b| b == (first > 0)) == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let mut moved = false;
                for j in 2..c.len() {
                    let l = c[j];
                    if self.assign[var(l)].map(|b| b == (l > 0)) != Some(false) {
                        c.swap(1, j);
                        let w = c[1];
                        self.watches[code(w)].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(ci);
                match self.value(first) {
                    Some(false) => conflict = Some(ci),
                    _ => self.enqueue(first, Some(ci)),
                }
            }
            ws.clear();
            keep.append(&mut self.watches[code(falsified)]);
            self.watches[code(falsified)] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn backtrack(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let mark = self.limits[lvl];
        while self.trail.len() > mark {
            let l = self.trail.pop().unwrap();
            self.assign[var(l)] = None;
            self.reason[var(l)] = None;
        }
        self.limits.truncate(lvl);
        self.qhead = mark;
    }

    /// Asserted atoms as constraints, with the literal asserting each.
    fn asserted(&self) -> (Vec<Constraint>, Vec<Lit>) {
        let mut cs = Vec::new();
        let mut lits = Vec::new();
        for &l in &self.trail {
            if let Some(atom) = &self.enc.atoms[var(l)] {
                cs.push(constraint(atom, l > 0));
                lits.push(l);
            }
        }
        (cs, lits)
    }

    /// Rational check of the asserted atoms; on failure, the literals of an
    /// infeasible subset.
    fn theory_conflict(&mut self) -> Result<Option<Vec<Lit>>, TheoryError> {
        let (cs, lits) = self.asserted();
        if let Some(m) = &self.cached {
            if cs.iter().all(|c| holds(c, m)) {
                return Ok(None);
            }
        }
        let n = self.enc.int_vars.len();
        Ok(infeasible_subset(n, &cs, self.budget)?.map(|core| core.into_iter().map(|k| lits[k]).collect()))
    }

    /// Integer check once every clause is satisfied; on failure, all
    /// asserted atom literals.
    fn integer_conflict(&mut self) -> Result<Option<Vec<Lit>>, TheoryError> {
        let (cs, lits) = self.asserted();
        if let Some(m) = &self.cached {
            if cs.iter().all(|c| holds(c, m)) {
                return Ok(None);
            }
        }
        match solve_integer(self.enc.int_vars.len(), &cs, self.budget)? {
            Some(m) => {
                self.cached = Some(m);
                Ok(None)
            }
            None => Ok(Some(lits)),
        }
    }

    /// First-UIP learned clause (asserting literal first) and the level to
    /// return to. `confl` must be false and contain a literal of the current
    /// level.
    fn analyze(&mut self, confl: Vec<Lit>) -> (Vec<Lit>, usize) {
        let current = self.decision_level();
        let mut seen = vec![false; self.assign.len()];
        let mut learnt = vec![0];
        let mut pending = 0usize;
        let mut clause = confl;
        let mut idx = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            for &q in &clause {
                if Some(q) == p {
                    continue;
                }
                let v = var(q);
                if seen[v] || self.level[v] == 0 {
                    continue;
                }
                seen[v] = true;
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if seen[var(self.trail[idx])] {
                    break;
                }
            }
            let l = self.trail[idx];
            seen[var(l)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = -l;
                break;
            }
            p = Some(l);
            clause = self.clauses[self.reason[var(l)].expect("implied literal")].clone();
        }
        let back = learnt[1..].iter().map(|&q| self.level[var(q)]).max().unwrap_or(0);
        // Second watch goes on a literal of the backjump level.
        if learnt.len() > 1 {
            let k = 1 + learnt[1..].iter().position(|&q| self.level[var(q)] == back).unwrap();
            learnt.swap(1, k);
        }
        (learnt, back)
    }

    /// Resolve a conflict; false when it holds at level zero.
    fn resolve(&mut self, c: Conflict) -> Result<bool, TheoryError> {
        self.budget.tick_pivot()?;
        let lits = match c {
            Conflict::Clause(ci) => self.clauses[ci].clone(),
            Conflict::Lits(ls) => ls.into_iter().map(|l| -l).collect(),
        };
        let top = lits.iter().map(|&l| self.level[var(l)]).max().unwrap_or(0);
        if top == 0 {
            return Ok(false);
        }
        self.backtrack(top);
        let (learnt, back) = self.analyze(lits);
        self.backtrack(back);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let asserting = learnt[0];
            let ci = self.attach(learnt);
            self.enqueue(asserting, Some(ci));
        }
        Ok(true)
    }

    /// First unassigned literal of the first original clause not yet
    /// satisfied.
    fn pick(&self) -> Option<Lit> {
        for c in &self.clauses[..self.original] {
            if c.iter().any(|&l| self.value(l) == Some(true)) {
                continue;
            }
            if let Some(&l) = c.iter().find(|&&l| self.value(l).is_none()) {
                return Some(l);
            }
        }
        None
    }

    fn run(&mut self) -> Result<bool, TheoryError> {
        loop {
            if let Some(ci) = self.propagate() {
                if !self.resolve(Conflict::Clause(ci))? {
                    return Ok(false);
                }
                continue;
            }
            if let Some(core) = self.theory_conflict()? {
                if !self.resolve(Conflict::Lits(core))? {
                    return Ok(false);
                }
                continue;
            }
            match self.pick() {
                Some(l) => {
                    self.budget.tick_pivot()?;
                    self.limits.push(self.trail.len());
                    self.enqueue(l, None);
                }
                None => match self.integer_conflict()? {
                    None => return Ok(true),
                    Some(lits) => {
                        if !self.resolve(Conflict::Lits(lits))? {
                            return Ok(false);
                        }
                    }
                },
            }
        }
    }
}

/// A satisfying propositional assignment with an integer model of its
/// asserted atoms, or None when the clauses are unsatisfiable modulo LIA.
pub fn solve(enc: &Encoding, budget: &mut Budget) -> Result<Option<Model>, TheoryError> {
    if enc.trivially_false {
        return Ok(None);
    }
    let n = enc.num_vars + 1;
    let mut s = Solver {
        enc,
        clauses: Vec::new(),
        original: 0,
        watches: vec![Vec::new(); 2 * n],
        assign: vec![None; n],
        level: vec![0; n],
        reason: vec![None; n],
        trail: Vec::new(),
        limits: Vec::new(),
        qhead: 0,
        cached: None,
        budget,
    };
    let mut units = Vec::new();
    for c in &enc.clauses {
        let mut c = c.clone();
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|&l| c.contains(&-l)) {
            continue;
        }
        match c.len() {
            0 => return Ok(None),
            1 => units.push(c[0]),
            _ => {
                s.attach(c);
            }
        }
    }
    s.original = s.clauses.len();
    for u in units {
        match s.value(u) {
            Some(true) => {}
            Some(false) => return Ok(None),
            None => s.enqueue(u, None),
        }
    }
    if !s.run()? {
        return Ok(None);
    }
    let ints = match s.cached.take() {
        Some(m) => m,
        None => vec![BigInt::from(0); enc.int_vars.len()],
    };
    Ok(Some(Model { props: s.assign, ints }))
}
