//! Canonical forms for Eval-free Int/Bool terms.
//!
//! Int terms become a sum of monomials `c·b` over opaque bases `b` (variables,
//! ite terms, uninterpreted applications) ordered by the term order, plus a
//! constant. Bool terms become negation normal form: conjunctions and
//! disjunctions are flattened, sorted and duplicate-free, and arithmetic
//! literals are rewritten to `c <= Σ` (gcd-reduced, no constant on the right)
//! or `Σ = c` (leading coefficient positive).
//!
//! Equal normal forms imply semantic equivalence; the converse does not hold.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::term::{Op, Sort, Term};

/// A term in canonical form; `normalize(t.term()) == t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalTerm(Term);

impl NormalTerm {
    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

impl fmt::Display for NormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn normalize(t: &Term) -> NormalTerm {
    NormalTerm(normal_term(t))
}

fn normal_term(t: &Term) -> Term {
    match t {
        Term::Cons(..) => t.clone(),
        _ => match t.sort() {
            Sort::Bool => norm_bool(t),
            Sort::Int => LinSum::of(t).to_term(),
            Sort::Datatype(_) => t.clone(),
        },
    }
}

/// Normal form of the negation of a Bool term.
pub fn negate(t: &Term) -> Term {
    norm_neg(t)
}

/// Linear combination of opaque bases plus a constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinSum {
    pub terms: BTreeMap<Term, BigInt>,
    pub constant: BigInt,
}

impl LinSum {
    pub fn constant(c: BigInt) -> Self {
        LinSum {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    fn base(t: Term) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(t, BigInt::one());
        LinSum {
            terms,
            constant: BigInt::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, other: LinSum) {
        for (b, c) in other.terms {
            let entry = self.terms.entry(b).or_insert_with(BigInt::zero);
            *entry += c;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self.constant += other.constant;
    }

    fn scale(mut self, k: &BigInt) -> Self {
        if k.is_zero() {
            return LinSum::constant(BigInt::zero());
        }
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }

    fn sub(mut self, other: LinSum) -> Self {
        self.add_assign(other.scale(&-BigInt::one()));
        self
    }

    /// Linear form of an Int term.
    pub fn of(t: &Term) -> LinSum {
        match t {
            Term::Int(v) => LinSum::constant(v.clone()),
            Term::Var(..) => LinSum::base(t.clone()),
            Term::Apply(op, args) => match op {
                Op::Add => {
                    let mut acc = LinSum::constant(BigInt::zero());
                    for a in args {
                        acc.add_assign(LinSum::of(a));
                    }
                    acc
                }
                Op::Sub => LinSum::of(&args[0]).sub(LinSum::of(&args[1])),
                Op::Neg => LinSum::of(&args[0]).scale(&-BigInt::one()),
                Op::Mul => {
                    let a = LinSum::of(&args[0]);
                    let b = LinSum::of(&args[1]);
                    if a.is_constant() {
                        let k = a.constant;
                        b.scale(&k)
                    } else if b.is_constant() {
                        let k = b.constant;
                        a.scale(&k)
                    } else {
                        LinSum::base(Term::Apply(Op::Mul, alloc::vec![a.to_term(), b.to_term()]))
                    }
                }
                Op::Ite => norm_ite(&args[0], &args[1], &args[2]),
                _ => LinSum::base(t.clone()),
            },
            Term::Call(n, s, args) => LinSum::base(Term::Call(
                n.clone(),
                s.clone(),
                args.iter().map(normal_term).collect(),
            )),
            Term::Eval(d, r, prog, inputs) => LinSum::base(Term::Eval(
                d.clone(),
                r.clone(),
                prog.clone(),
                inputs.iter().map(normal_term).collect(),
            )),
            _ => LinSum::base(t.clone()),
        }
    }

    /// Canonical term for this sum. `LinSum::of(&s.to_term()) == s`.
    pub fn to_term(&self) -> Term {
        if self.terms.len() == 1 {
            let (base, k) = self.terms.iter().next().unwrap();
            if let Some(cond) = indicator_condition(base) {
                return Term::ite(
                    cond.clone(),
                    Term::Int(k + &self.constant),
                    Term::Int(self.constant.clone()),
                );
            }
        }
        let mut parts: Vec<Term> = self
            .terms
            .iter()
            .map(|(b, c)| monomial(b, c))
            .collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(Term::Int(self.constant.clone()));
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Apply(Op::Add, parts)
        }
    }

    /// `Σ` without the constant, as a term.
    pub fn linear_part(&self) -> LinSum {
        LinSum {
            terms: self.terms.clone(),
            constant: BigInt::zero(),
        }
    }

    pub fn coeff_gcd(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

pub(crate) fn monomial(base: &Term, coeff: &BigInt) -> Term {
    if coeff.is_one() {
        base.clone()
    } else {
        Term::Apply(Op::Mul, alloc::vec![Term::Int(coeff.clone()), base.clone()])
    }
}

/// `ite(c, 1, 0)` bases stand for the indicator of `c`.
fn indicator_condition(base: &Term) -> Option<&Term> {
    match base {
        Term::Apply(Op::Ite, args)
            if args[1] == Term::Int(BigInt::one()) && args[2] == Term::Int(BigInt::zero()) =>
        {
            Some(&args[0])
        }
        _ => None,
    }
}

fn norm_ite(c: &Term, a: &Term, b: &Term) -> LinSum {
    let mut cond = norm_bool(c);
    let (mut a, mut b) = (a, b);
    match cond {
        Term::Bool(true) => return LinSum::of(a),
        Term::Bool(false) => return LinSum::of(b),
        _ => {}
    }
    if let Term::Apply(Op::Not, args) = &cond {
        let inner = args[0].clone();
        cond = inner;
        core::mem::swap(&mut a, &mut b);
    }
    let na = LinSum::of(a);
    let nb = LinSum::of(b);
    if na == nb {
        return na;
    }
    if na.is_constant() && nb.is_constant() {
        let step = &na.constant - &nb.constant;
        let indicator = Term::ite(cond, Term::int(1), Term::int(0));
        let mut out = LinSum::base(indicator).scale(&step);
        out.constant = nb.constant;
        return out;
    }
    LinSum::base(Term::ite(cond, na.to_term(), nb.to_term()))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    // b > 0
    -((-a).div_floor(b))
}

/// NF of `diff >= 0`.
fn le_atom(diff: LinSum) -> Term {
    if diff.is_constant() {
        return Term::Bool(!diff.constant.is_negative());
    }
    let g = diff.coeff_gcd();
    let bound = ceil_div(&-&diff.constant, &g);
    let mut sigma = diff.linear_part();
    for c in sigma.terms.values_mut() {
        *c = &*c / &g;
    }
    Term::Apply(Op::Le, alloc::vec![Term::Int(bound), sigma.to_term()])
}

/// NF of `diff = 0`.
fn eq_atom(diff: LinSum) -> Term {
    if diff.is_constant() {
        return Term::Bool(diff.constant.is_zero());
    }
    let g = diff.coeff_gcd();
    let rhs = -&diff.constant;
    if !(&rhs % &g).is_zero() {
        return Term::Bool(false);
    }
    let mut sigma = diff.linear_part();
    let mut c = &rhs / &g;
    for v in sigma.terms.values_mut() {
        *v = &*v / &g;
    }
    if sigma.terms.values().next().is_some_and(|v| v.is_negative()) {
        for v in sigma.terms.values_mut() {
            *v = -&*v;
        }
        c = -c;
    }
    Term::Apply(Op::Eq, alloc::vec![sigma.to_term(), Term::Int(c)])
}

fn is_bool_eq(args: &[Term]) -> bool {
    args[0].sort() == Sort::Bool
}

fn norm_bool(t: &Term) -> Term {
    match t {
        Term::Bool(_) | Term::Var(..) => t.clone(),
        Term::Apply(op, args) => match op {
            Op::Not => norm_neg(&args[0]),
            Op::And => mk_and(args.iter().map(norm_bool).collect()),
            Op::Or => mk_or(args.iter().map(norm_bool).collect()),
            Op::Implies => mk_or(alloc::vec![norm_neg(&args[0]), norm_bool(&args[1])]),
            Op::Eq if is_bool_eq(args) => mk_or(alloc::vec![
                mk_and(alloc::vec![norm_bool(&args[0]), norm_bool(&args[1])]),
                mk_and(alloc::vec![norm_neg(&args[0]), norm_neg(&args[1])]),
            ]),
            Op::Eq => eq_atom(LinSum::of(&args[0]).sub(LinSum::of(&args[1]))),
            Op::Le => le_atom(LinSum::of(&args[1]).sub(LinSum::of(&args[0]))),
            Op::Ge => le_atom(LinSum::of(&args[0]).sub(LinSum::of(&args[1]))),
            Op::Lt => {
                let mut d = LinSum::of(&args[1]).sub(LinSum::of(&args[0]));
                d.constant -= 1;
                le_atom(d)
            }
            Op::Gt => {
                let mut d = LinSum::of(&args[0]).sub(LinSum::of(&args[1]));
                d.constant -= 1;
                le_atom(d)
            }
            Op::Ite => mk_or(alloc::vec![
                mk_and(alloc::vec![norm_bool(&args[0]), norm_bool(&args[1])]),
                mk_and(alloc::vec![norm_neg(&args[0]), norm_bool(&args[2])]),
            ]),
            Op::Add | Op::Sub | Op::Neg | Op::Mul => t.clone(),
        },
        Term::Call(n, s, args) => Term::Call(n.clone(), s.clone(), args.iter().map(normal_term).collect()),
        Term::Eval(d, r, prog, inputs) => Term::Eval(
            d.clone(),
            r.clone(),
            prog.clone(),
            inputs.iter().map(normal_term).collect(),
        ),
        Term::Int(_) | Term::Cons(..) => t.clone(),
    }
}

fn norm_neg(t: &Term) -> Term {
    match t {
        Term::Bool(b) => Term::Bool(!b),
        Term::Var(..) => Term::not(t.clone()),
        Term::Apply(op, args) => match op {
            Op::Not => norm_bool(&args[0]),
            Op::And => mk_or(args.iter().map(norm_neg).collect()),
            Op::Or => mk_and(args.iter().map(norm_neg).collect()),
            Op::Implies => mk_and(alloc::vec![norm_bool(&args[0]), norm_neg(&args[1])]),
            Op::Eq if is_bool_eq(args) => mk_or(alloc::vec![
                mk_and(alloc::vec![norm_bool(&args[0]), norm_neg(&args[1])]),
                mk_and(alloc::vec![norm_neg(&args[0]), norm_bool(&args[1])]),
            ]),
            Op::Le | Op::Lt | Op::Ge | Op::Gt | Op::Eq => negate_literal(norm_bool(t)),
            Op::Ite => mk_or(alloc::vec![
                mk_and(alloc::vec![norm_bool(&args[0]), norm_neg(&args[1])]),
                mk_and(alloc::vec![norm_neg(&args[0]), norm_neg(&args[2])]),
            ]),
            Op::Add | Op::Sub | Op::Neg | Op::Mul => Term::not(t.clone()),
        },
        _ => Term::not(norm_bool(t)),
    }
}

/// Negation of an already-normal literal.
fn negate_literal(lit: Term) -> Term {
    match lit {
        Term::Bool(b) => Term::Bool(!b),
        Term::Apply(Op::Le, args) => {
            // ¬(c <= Σ)  ⇔  Σ <= c - 1  ⇔  1 - c <= -Σ
            let c = args[0].as_int().cloned().unwrap_or_default();
            let sigma = LinSum::of(&args[1]).scale(&-BigInt::one());
            Term::Apply(Op::Le, alloc::vec![Term::Int(BigInt::one() - c), sigma.to_term()])
        }
        Term::Apply(Op::Not, mut args) => args.pop().unwrap(),
        other => Term::not(other),
    }
}

fn mk_junction(op: Op, args: Vec<Term>) -> Term {
    let (unit, zero) = if op == Op::And { (true, false) } else { (false, true) };
    let mut set = BTreeSet::new();
    for a in args {
        match a {
            Term::Bool(b) if b == unit => {}
            Term::Bool(b) if b == zero => return Term::Bool(zero),
            Term::Apply(o, inner) if o == op => set.extend(inner),
            other => {
                set.insert(other);
            }
        }
    }
    for a in &set {
        if set.contains(&norm_neg(a)) {
            return Term::Bool(zero);
        }
    }
    let mut items: Vec<Term> = set.into_iter().collect();
    match items.len() {
        0 => Term::Bool(unit),
        1 => items.pop().unwrap(),
        _ => Term::Apply(op, items),
    }
}

fn mk_and(args: Vec<Term>) -> Term {
    mk_junction(Op::And, args)
}

fn mk_or(args: Vec<Term>) -> Term {
    mk_junction(Op::Or, args)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn x(n: &str) -> Term {
        Term::int_var(n)
    }

    #[test]
    fn doubled_variable_matches_scaled_variable() {
        let a = normalize(&Term::add(x("x2"), x("x2")));
        let b = normalize(&Term::mul(2, x("x2")));
        assert_eq!(a, b);
        assert_eq!(normalize(&x("x1")).term(), &x("x1"));
        assert_eq!(normalize(&Term::add(Term::int(1), Term::int(2))).term(), &Term::int(3));
    }

    #[test]
    fn sums_are_ordered_by_variable_name() {
        let t = Term::add(Term::add(x("b"), Term::int(4)), Term::sub(x("a"), Term::int(1)));
        assert_eq!(
            normalize(&t).term(),
            &Term::app(Op::Add, vec![x("a"), x("b"), Term::int(3)])
        );
    }

    #[test]
    fn comparisons_share_a_form() {
        let a = normalize(&Term::ge(x("x2"), x("x1")));
        let b = normalize(&Term::le(x("x1"), x("x2")));
        let c = normalize(&Term::not(Term::gt(x("x1"), x("x2"))));
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(
            a.term(),
            &Term::le(Term::int(0), Term::app(Op::Add, vec![Term::mul(-1, x("x1")), x("x2")]))
        );
    }

    #[test]
    fn atoms_are_gcd_reduced() {
        // 2x <= 3  ⇔  x <= 1  ⇔  -1 <= -x
        let a = normalize(&Term::le(Term::mul(2, x("x")), Term::int(3)));
        let b = normalize(&Term::le(x("x"), Term::int(1)));
        assert_eq!(a, b);
        assert_eq!(normalize(&Term::eq(Term::mul(2, x("x")), Term::int(3))).term(), &Term::Bool(false));
    }

    #[test]
    fn trivial_atoms_fold() {
        assert_eq!(normalize(&Term::ge(x("y"), x("y"))).term(), &Term::Bool(true));
        assert_eq!(normalize(&Term::lt(x("y"), x("y"))).term(), &Term::Bool(false));
        let t = Term::and(vec![Term::le(x("a"), x("b")), Term::gt(x("a"), x("b"))]);
        assert_eq!(normalize(&t).term(), &Term::Bool(false));
    }

    #[test]
    fn literal_ite_folds_constants() {
        let c = Term::le(x("a"), x("b"));
        let lhs = Term::add(Term::mul(3, Term::ite(c.clone(), Term::int(1), Term::int(2))), Term::int(4));
        let rhs = Term::ite(c, Term::int(7), Term::int(10));
        assert_eq!(normalize(&lhs), normalize(&rhs));
    }

    #[test]
    fn normal_forms_are_fixpoints() {
        let terms = vec![
            Term::ite(
                Term::not(Term::eq(x("a"), Term::int(2))),
                Term::add(x("a"), x("b")),
                Term::int(3),
            ),
            Term::or(vec![
                Term::bool_var("p"),
                Term::and(vec![Term::not(Term::bool_var("q")), Term::lt(x("a"), Term::int(0))]),
            ]),
            Term::eq(Term::bool_var("p"), Term::le(x("a"), x("b"))),
        ];
        for t in terms {
            let n = normalize(&t);
            assert_eq!(normalize(n.term()), n, "{}", t);
        }
    }
}
