//! Satisfiability of ground linear Int/Bool formulas, with models.

mod linear;
mod sat;
pub mod simplex;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::problem::SynthProblem;
use crate::term::{holds, replace_calls, Assignment, Lambda, Sort, Term, Value};

/// Default branch-and-bound node budget per query.
pub const DEFAULT_NODES: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("nonlinear term")]
    NonlinearTerm,
    #[error("branch-and-bound node budget exhausted")]
    ResourceOut,
    #[error("cancelled")]
    Cancelled,
    #[error("unbound constant {0}")]
    Unbound(String),
    #[error("ill-sorted assertion")]
    IllSorted,
    #[error("assertion contains a function application or evaluation operator")]
    Unsupported,
    #[error("model failed verification")]
    Unsound,
}

/// Resource limits for one query.
#[derive(Clone, Debug)]
pub struct Budget {
    pub nodes: u64,
    pub stop: Option<Arc<AtomicBool>>,
    used: u64,
    ticks: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_NODES, None)
    }
}

impl Budget {
    pub fn new(nodes: u64, stop: Option<Arc<AtomicBool>>) -> Self {
        Budget {
            nodes,
            stop,
            used: 0,
            ticks: 0,
        }
    }

    /// Fresh budget with the same limits.
    pub fn renew(&self) -> Self {
        Budget::new(self.nodes, self.stop.clone())
    }

    pub fn cancelled(&self) -> bool {
        self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
    }

    pub(crate) fn tick_node(&mut self) -> Result<(), TheoryError> {
        self.used += 1;
        if self.used > self.nodes {
            return Err(TheoryError::ResourceOut);
        }
        self.tick_pivot()
    }

    pub(crate) fn tick_pivot(&mut self) -> Result<(), TheoryError> {
        self.ticks += 1;
        if self.ticks % 64 == 0 && self.cancelled() {
            return Err(TheoryError::Cancelled);
        }
        Ok(())
    }
}

/// A conjunction of ground assertions over declared constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundQuery {
    pub assertions: Vec<Term>,
    pub env: Vec<(String, Sort)>,
}

impl GroundQuery {
    pub fn new(env: Vec<(String, Sort)>) -> Self {
        GroundQuery {
            assertions: Vec::new(),
            env,
        }
    }

    pub fn assert(&mut self, t: Term) {
        self.assertions.push(t);
    }

    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) {
        self.env.push((name.into(), sort));
    }

    fn holds_under(&self, a: &Assignment) -> bool {
        self.assertions.iter().all(|t| holds(t, a) == Ok(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Sat(Assignment),
    Unsat,
}

impl CheckResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CheckResult::Sat(_))
    }
}

pub fn check_sat(q: &GroundQuery) -> Result<CheckResult, TheoryError> {
    check_sat_with(q, &mut Budget::default())
}

/// Decide `q`. Models are total over the environment, checked by
/// evaluation, and shrunk toward zero one constant at a time.
pub fn check_sat_with(q: &GroundQuery, budget: &mut Budget) -> Result<CheckResult, TheoryError> {
    let mut enc = linear::Encoder::new(&q.env);
    for t in &q.assertions {
        enc.assert(t)?;
    }
    let enc = enc.finish();
    let model = match sat::solve(&enc, budget)? {
        None => return Ok(CheckResult::Unsat),
        Some(m) => m,
    };
    let mut a = Assignment::new();
    for (name, sort) in &q.env {
        match sort {
            Sort::Int => {
                let i = enc.int_vars.iter().position(|n| n == name).unwrap();
                a.insert(name.clone(), Value::Int(model.ints[i].clone()));
            }
            Sort::Bool => {
                let v = enc.bool_vars[name];
                a.insert(name.clone(), Value::Bool(model.props[v].unwrap_or(false)));
            }
            Sort::Datatype(_) => {}
        }
    }
    if !q.holds_under(&a) {
        return Err(TheoryError::Unsound);
    }
    minimize(q, &mut a);
    Ok(CheckResult::Sat(a))
}

/// Greedily move each Int constant toward zero while the query still holds.
fn minimize(q: &GroundQuery, a: &mut Assignment) {
    for (name, sort) in &q.env {
        if *sort != Sort::Int {
            continue;
        }
        let v = match a.get(name) {
            Some(Value::Int(v)) => v.clone(),
            _ => continue,
        };
        if v.is_zero() {
            continue;
        }
        let try_value = |a: &mut Assignment, x: &BigInt| {
            let old = a.get(name).cloned();
            a.insert(name.clone(), Value::Int(x.clone()));
            if q.holds_under(a) {
                true
            } else {
                if let Some(o) = old {
                    a.insert(name.clone(), o);
                }
                false
            }
        };
        if try_value(a, &BigInt::zero()) {
            continue;
        }
        // Binary search on magnitude between 0 (fails) and |v| (holds).
        let sign = if v.is_negative() { BigInt::from(-1) } else { BigInt::from(1) };
        let mut lo = BigInt::zero();
        let mut hi = v.abs();
        while &hi - &lo > BigInt::from(1) {
            let mid: BigInt = (&lo + &hi) / 2;
            if try_value(a, &(&mid * &sign)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        a.insert(name.clone(), Value::Int(hi * sign));
    }
}

/// Inputs on which `candidate` violates the problem's constraints.
pub fn find_counterexample(candidate: &Lambda, p: &SynthProblem) -> Result<Option<Assignment>, TheoryError> {
    find_counterexample_with(candidate, p, &mut Budget::default())
}

pub fn find_counterexample_with(
    candidate: &Lambda,
    p: &SynthProblem,
    budget: &mut Budget,
) -> Result<Option<Assignment>, TheoryError> {
    let body = replace_calls(&p.conjecture(), &p.target.name, candidate);
    let mut q = GroundQuery::new(p.universals.clone());
    q.assert(Term::not(body));
    match check_sat_with(&q, budget)? {
        CheckResult::Unsat => Ok(None),
        CheckResult::Sat(a) => Ok(Some(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn int_env(names: &[&str]) -> Vec<(String, Sort)> {
        names.iter().map(|n| (String::from(*n), Sort::Int)).collect()
    }

    fn x(n: &str) -> Term {
        Term::int_var(n)
    }

    #[test]
    fn contradictory_bounds() {
        let mut q = GroundQuery::new(int_env(&["y"]));
        q.assert(Term::ge(x("y"), Term::int(0)));
        q.assert(Term::le(x("y"), Term::int(-1)));
        assert_eq!(check_sat(&q), Ok(CheckResult::Unsat));
    }

    #[test]
    fn strict_order_has_small_model() {
        let mut q = GroundQuery::new(int_env(&["x1", "x2"]));
        q.assert(Term::gt(x("x1"), x("x2")));
        match check_sat(&q).unwrap() {
            CheckResult::Sat(a) => {
                assert!(q.holds_under(&a));
                let v1 = a.get("x1").unwrap().as_int().unwrap().abs();
                let v2 = a.get("x2").unwrap().as_int().unwrap().abs();
                assert!(v1 + v2 <= BigInt::from(1));
            }
            CheckResult::Unsat => panic!("satisfiable"),
        }
    }

    #[test]
    fn booleans_and_ite() {
        let mut q = GroundQuery::new(vec![(String::from("b"), Sort::Bool), (String::from("x"), Sort::Int)]);
        q.assert(Term::eq(
            Term::ite(Term::bool_var("b"), x("x"), Term::int(3)),
            Term::int(5),
        ));
        match check_sat(&q).unwrap() {
            CheckResult::Sat(a) => {
                assert_eq!(a.get("b"), Some(&Value::Bool(true)));
                assert_eq!(a.get("x"), Some(&Value::int(5)));
            }
            CheckResult::Unsat => panic!("satisfiable"),
        }
        q.assert(Term::not(Term::bool_var("b")));
        assert_eq!(check_sat(&q), Ok(CheckResult::Unsat));
    }

    #[test]
    fn parity_is_detected_by_tightening() {
        let mut q = GroundQuery::new(int_env(&["x", "y"]));
        q.assert(Term::eq(Term::add(Term::mul(2, x("x")), Term::mul(2, x("y"))), Term::int(1)));
        assert_eq!(check_sat(&q), Ok(CheckResult::Unsat));
    }

    #[test]
    fn nonlinear_terms_are_rejected() {
        let mut q = GroundQuery::new(int_env(&["x"]));
        q.assert(Term::eq(Term::app(crate::term::Op::Mul, vec![x("x"), x("x")]), Term::int(4)));
        assert_eq!(check_sat(&q), Err(TheoryError::NonlinearTerm));
    }
}
