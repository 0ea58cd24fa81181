//! Size-non-increasing cleanup of synthesized solutions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::normal::{negate, normalize, NormalTerm};
use crate::term::{eval_ground, substitute, Assignment, Lambda, Op, Sort, Term, Value};

/// Rewrite-step budget for one call of [`simplify_solution`].
pub const REWRITE_BUDGET: usize = 100_000;

/// Constant folding, ite pruning, redundant-branch removal and path-based
/// literal/equality resolution, applied to a fixpoint.
pub fn simplify_solution(l: &Lambda) -> Lambda {
    let body = simplify_term(&l.body, REWRITE_BUDGET);
    if body.size() <= l.body.size() {
        Lambda::new(l.params.clone(), body)
    } else {
        l.clone()
    }
}

pub fn simplify_term(t: &Term, budget: usize) -> Term {
    let mut steps = 0usize;
    let mut cur = t.clone();
    loop {
        let next = pass(&cur, &mut steps);
        if next == cur || steps >= budget {
            return if next.size() <= cur.size() { next } else { cur };
        }
        cur = next;
    }
}

fn pass(t: &Term, steps: &mut usize) -> Term {
    t.map_bottom_up(&mut |node| {
        let out = rewrite(node.clone());
        if out != node {
            *steps += 1;
        }
        out
    })
}

fn has_eval_or_call(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| {
        if matches!(s, Term::Eval(..) | Term::Call(..) | Term::Cons(..)) {
            found = true;
        }
    });
    found
}

fn rewrite(t: Term) -> Term {
    if let Some(folded) = fold(&t) {
        return folded;
    }
    match t {
        Term::Apply(op, args) => rewrite_apply(op, args),
        other => other,
    }
}

/// Replace a compound Int/Bool node by a literal when its value is fixed.
fn fold(t: &Term) -> Option<Term> {
    if !matches!(t, Term::Apply(..)) || has_eval_or_call(t) {
        return None;
    }
    if t.children().iter().all(Term::is_literal) {
        return eval_ground(t, &Assignment::new()).ok().map(|v| match v {
            Value::Int(i) => Term::Int(i),
            Value::Bool(b) => Term::Bool(b),
            Value::Datatype(_) => unreachable!(),
        });
    }
    let n = normalize(t);
    if n.term().is_literal() {
        Some(n.into_term())
    } else {
        None
    }
}

fn rewrite_apply(op: Op, args: Vec<Term>) -> Term {
    match op {
        Op::And | Op::Or => junction(op, args),
        Op::Not => match &args[0] {
            Term::Bool(b) => Term::Bool(!b),
            Term::Apply(Op::Not, inner) => inner[0].clone(),
            _ => Term::Apply(op, args),
        },
        Op::Add => {
            let mut kept: Vec<Term> = args.into_iter().filter(|a| a.as_int().map_or(true, |v| !v.is_zero())).collect();
            match kept.len() {
                0 => Term::Int(BigInt::zero()),
                1 => kept.pop().unwrap(),
                _ => Term::Apply(op, kept),
            }
        }
        Op::Sub if args[1].as_int().is_some_and(Zero::is_zero) => args[0].clone(),
        Op::Mul => {
            let (lit, other) = if args[0].is_literal() { (&args[0], &args[1]) } else { (&args[1], &args[0]) };
            match lit.as_int() {
                Some(v) if v.is_one() => other.clone(),
                Some(v) if v.is_zero() => Term::Int(BigInt::zero()),
                _ => Term::Apply(op, args),
            }
        }
        Op::Ite => ite(args),
        _ => Term::Apply(op, args),
    }
}

fn junction(op: Op, args: Vec<Term>) -> Term {
    let (unit, zero) = if op == Op::And { (true, false) } else { (false, true) };
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for a in args {
        let parts = match a {
            Term::Apply(o, inner) if o == op => inner,
            other => alloc::vec![other],
        };
        for p in parts {
            match p {
                Term::Bool(b) if b == unit => {}
                Term::Bool(b) if b == zero => return Term::Bool(zero),
                other => {
                    if seen.insert(other.clone()) {
                        kept.push(other);
                    }
                }
            }
        }
    }
    match kept.len() {
        0 => Term::Bool(unit),
        1 => kept.pop().unwrap(),
        _ => Term::Apply(op, kept),
    }
}

fn ite(mut args: Vec<Term>) -> Term {
    let e = args.pop().unwrap();
    let a = args.pop().unwrap();
    let c = args.pop().unwrap();
    match c {
        Term::Bool(true) => return a,
        Term::Bool(false) => return e,
        _ => {}
    }
    if a == e {
        return a;
    }
    if has_eval_or_call(&c) {
        return Term::ite(c, a, e);
    }
    let then_facts: Vec<Term> = match &c {
        Term::Apply(Op::And, parts) => parts.clone(),
        other => alloc::vec![other.clone()],
    };
    let else_facts: Vec<Term> = match &c {
        Term::Apply(Op::Or, parts) => parts.clone(),
        other => alloc::vec![other.clone()],
    };
    let a2 = assume(&a, &then_facts, true);
    let e2 = assume(&e, &else_facts, false);
    let a = if a2.size() <= a.size() { a2 } else { a };
    let e = if e2.size() <= e.size() { e2 } else { e };
    if a == e {
        return a;
    }
    Term::ite(c, a, e)
}

/// Simplify `t` under the knowledge that each fact has truth value `value`.
fn assume(t: &Term, facts: &[Term], value: bool) -> Term {
    let mut known: BTreeMap<NormalTerm, bool> = BTreeMap::new();
    let mut eqs: BTreeMap<alloc::string::String, Term> = BTreeMap::new();
    for f in facts {
        if f.sort() != Sort::Bool || has_eval_or_call(f) {
            continue;
        }
        let n = normalize(f);
        let neg = normalize(&negate(n.term()));
        known.insert(n, value);
        known.insert(neg, !value);
        if value {
            if let Some((x, by)) = resolvable_equality(f) {
                eqs.insert(x, by);
            }
        }
    }
    let replaced = replace_known(t, &known);
    substitute(&replaced, &eqs)
}

/// `x = t` with `x` a variable and `t` a variable or literal.
fn resolvable_equality(f: &Term) -> Option<(alloc::string::String, Term)> {
    if let Term::Apply(Op::Eq, args) = f {
        let simple = |t: &Term| matches!(t, Term::Var(..) | Term::Int(_) | Term::Bool(_));
        match (&args[0], &args[1]) {
            (Term::Var(x, _), r) if simple(r) && r != &args[0] => return Some((x.clone(), r.clone())),
            (l, Term::Var(x, _)) if simple(l) => return Some((x.clone(), l.clone())),
            _ => {}
        }
    }
    None
}

fn replace_known(t: &Term, known: &BTreeMap<NormalTerm, bool>) -> Term {
    if let Term::Apply(op, args) = t {
        if t.sort() == Sort::Bool && !has_eval_or_call(t) {
            if let Some(b) = known.get(&normalize(t)) {
                return Term::Bool(*b);
            }
        }
        return Term::Apply(*op, args.iter().map(|a| replace_known(a, known)).collect());
    }
    if let Term::Var(_, Sort::Bool) = t {
        if let Some(b) = known.get(&normalize(t)) {
            return Term::Bool(*b);
        }
    }
    t.clone()
}
