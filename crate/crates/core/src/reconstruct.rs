//! Rewriting an unrestricted solution into a grammar.
//!
//! Subterms are matched against constructors directly or through a few
//! equivalent shapes; subterms with no match become obligations that are
//! discharged by enumerating grammar values until one normalizes to the
//! same term.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::engine::{EngineError, Limits, Outcome, Resource, Solution, Strategy};
use crate::grammar::{Analogue, Enumerator, GrammarEmbedding, Next};
use crate::normal::{negate, normalize, LinSum, NormalTerm};
use crate::term::{Lambda, Op, Sort, Term};

/// A subterm in normal form and the datatype it must be built in.
pub type Obligation = (NormalTerm, usize);

/// Decomposition options tried per subterm.
const MAX_OPTIONS: usize = 8;

pub struct ReconState<'e> {
    emb: &'e GrammarEmbedding,
    /// Known grammar terms: `normalize(s) == t` and `s` conforms to `D`.
    a_set: BTreeMap<Obligation, Term>,
    pending: BTreeSet<Obligation>,
    enumerator: Enumerator<'e>,
    enumerated: usize,
    exhausted: BTreeSet<usize>,
}

type Memo = BTreeMap<Obligation, (Term, Vec<Obligation>)>;

impl<'e> ReconState<'e> {
    pub fn new(emb: &'e GrammarEmbedding) -> Self {
        ReconState {
            emb,
            a_set: BTreeMap::new(),
            pending: BTreeSet::new(),
            enumerator: Enumerator::new(emb),
            enumerated: 0,
            exhausted: BTreeSet::new(),
        }
    }

    pub fn known(&self) -> impl Iterator<Item = (&Obligation, &Term)> {
        self.a_set.iter()
    }

    pub fn pending(&self) -> &BTreeSet<Obligation> {
        &self.pending
    }

    pub fn enumerated(&self) -> usize {
        self.enumerated
    }

    fn learn(&mut self, key: Obligation, s: Term) {
        if normalize(&s) == key.0 {
            self.a_set.entry(key).or_insert(s);
        }
    }

    /// A term equivalent to `t` and the subterms of it that are not yet
    /// known to be expressible in their datatype. When the list is empty
    /// the term conforms to datatype `dt`.
    pub fn rcon(&mut self, t: &Term, dt: usize) -> (Term, Vec<Obligation>) {
        let mut memo = Memo::new();
        let mut active = BTreeSet::new();
        self.go(t, dt, &mut memo, &mut active)
    }

    fn go(
        &mut self,
        t: &Term,
        dt: usize,
        memo: &mut Memo,
        active: &mut BTreeSet<Obligation>,
    ) -> (Term, Vec<Obligation>) {
        let key = (normalize(t), dt);
        if let Some(s) = self.a_set.get(&key) {
            return (s.clone(), Vec::new());
        }
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        if active.contains(&key) || self.emb.datatypes[dt].theory_sort != t.sort() {
            return (t.clone(), vec![key]);
        }
        active.insert(key.clone());
        let mut first_failure = None;
        let mut result = None;
        for (ci, kids) in self.options(t, dt) {
            let c = &self.emb.datatypes[dt].constructors[ci];
            let s = match &c.analogue {
                Analogue::Param(i) => {
                    let (n, s) = &self.emb.params[*i];
                    Some(Term::var(n.clone(), s.clone()))
                }
                Analogue::Int(v) => Some(Term::Int(v.clone())),
                Analogue::Bool(b) => Some(Term::Bool(*b)),
                Analogue::Op(_) => None,
            };
            if let Some(s) = s {
                result = Some(s);
                break;
            }
            let op = match c.analogue {
                Analogue::Op(op) => op,
                _ => unreachable!(),
            };
            let arg_dts: Vec<usize> = c.args.iter().map(|a| self.emb.index_of(a).unwrap()).collect();
            let mut built = Vec::new();
            let mut missing = Vec::new();
            for (k, j) in kids.iter().zip(arg_dts) {
                let (s, u) = self.go(k, j, memo, active);
                built.push(s);
                missing.extend(u);
            }
            let s = Term::Apply(op, built);
            if missing.is_empty() {
                result = Some(s);
                break;
            }
            if first_failure.is_none() {
                first_failure = Some((s, missing));
            }
        }
        active.remove(&key);
        let r = match result {
            Some(s) => {
                self.learn(key.clone(), s.clone());
                (s, Vec::new())
            }
            None => first_failure.unwrap_or_else(|| (t.clone(), vec![key.clone()])),
        };
        memo.insert(key, r.clone());
        r
    }

    /// Constructors of `dt` that can build `t`, each with the subterms its
    /// arguments must build.
    fn options(&self, t: &Term, dt: usize) -> Vec<(usize, Vec<Term>)> {
        let decl = &self.emb.datatypes[dt];
        let mut out = Vec::new();
        for (ci, c) in decl.constructors.iter().enumerate() {
            let hit = match (&c.analogue, t) {
                (Analogue::Param(i), Term::Var(n, _)) => self.emb.params[*i].0 == *n,
                (Analogue::Int(v), Term::Int(w)) => v == w,
                (Analogue::Bool(b), Term::Bool(w)) => b == w,
                _ => false,
            };
            if hit {
                return vec![(ci, Vec::new())];
            }
        }
        for (op, kids) in shapes(t) {
            for (ci, c) in decl.constructors.iter().enumerate() {
                if c.analogue != Analogue::Op(op) || c.args.len() != kids.len() {
                    continue;
                }
                let sorts_ok = c.args.iter().zip(&kids).all(|(a, k)| {
                    self.emb.decl(a).is_some_and(|d| d.theory_sort == k.sort())
                });
                if sorts_ok {
                    out.push((ci, kids.clone()));
                }
            }
            if out.len() >= MAX_OPTIONS {
                break;
            }
        }
        out.truncate(MAX_OPTIONS);
        out
    }

    /// Produce one value of each datatype in `dts`, recording it. True when
    /// a pending obligation was met.
    fn enumerate_round(&mut self, dts: &BTreeSet<usize>) -> bool {
        let mut hit = false;
        for &dt in dts {
            match self.enumerator.next_of(dt) {
                Next::Value(d) => {
                    self.enumerated += 1;
                    let s = self.emb.analogue(&d);
                    let key = (normalize(&s), dt);
                    if self.pending.contains(&key) && !self.a_set.contains_key(&key) {
                        hit = true;
                    }
                    self.a_set.entry(key).or_insert(s);
                }
                Next::End(_) => {
                    self.exhausted.insert(dt);
                }
            }
        }
        hit
    }
}

/// Equivalent shapes of `t`, each an operator over argument terms. The
/// term's own shape comes first, except that comparisons prefer the form
/// with both sides free of negative coefficients.
fn shapes(t: &Term) -> Vec<(Op, Vec<Term>)> {
    let mut out = Vec::new();
    match t {
        Term::Int(v) => {
            if v.is_negative() {
                out.push((Op::Neg, vec![Term::Int(-v)]));
                out.push((Op::Sub, vec![Term::int(0), Term::Int(-v)]));
            } else if *v > BigInt::one() {
                out.push((Op::Add, vec![Term::Int(v - 1), Term::int(1)]));
            }
        }
        Term::Bool(b) => out.push((Op::Not, vec![Term::Bool(!b)])),
        Term::Apply(op, args) => shapes_apply(*op, args, &mut out),
        _ => {}
    }
    out
}

fn shapes_apply(op: Op, args: &[Term], out: &mut Vec<(Op, Vec<Term>)>) {
    let a = || args[0].clone();
    let b = || args[1].clone();
    match op {
        Op::Le | Op::Lt | Op::Eq if args[0].sort() == Sort::Int => {
            let (l, r) = balanced(&args[0], &args[1]);
            if (l.clone(), r.clone()) != (a(), b()) {
                out.push((op, vec![l, r]));
            }
        }
        Op::Ge | Op::Gt => {
            let (l, r) = balanced(&args[1], &args[0]);
            let flip = if op == Op::Ge { Op::Le } else { Op::Lt };
            out.push((flip, vec![l, r]));
        }
        _ => {}
    }
    if matches!(op, Op::Add | Op::And | Op::Or) && args.len() > 2 {
        out.push((op, vec![a(), Term::Apply(op, args[1..].to_vec())]));
    } else {
        out.push((op, args.to_vec()));
    }
    match op {
        Op::Add => {
            let s = LinSum::of(&Term::Apply(Op::Add, args.to_vec()));
            let (pos, neg) = split_signs(&s);
            if !neg.terms.is_empty() || neg.constant.is_positive() {
                out.push((Op::Sub, vec![pos.to_term(), neg.to_term()]));
            }
        }
        Op::Sub => out.push((Op::Add, vec![a(), Term::neg(b())])),
        Op::Neg => out.push((Op::Sub, vec![Term::int(0), a()])),
        Op::Mul => {
            if let Some(c) = args[0].as_int().filter(|c| c.is_negative()) {
                let inner = if (-c).is_one() { b() } else { Term::Apply(Op::Mul, vec![Term::Int(-c), b()]) };
                out.push((Op::Neg, vec![inner.clone()]));
                out.push((Op::Sub, vec![Term::int(0), inner]));
            }
        }
        Op::Le => {
            out.push((Op::Ge, vec![b(), a()]));
            out.push((Op::Not, vec![Term::gt(a(), b())]));
            out.push((Op::Not, vec![Term::lt(b(), a())]));
            out.push((Op::Or, vec![Term::lt(a(), b()), Term::eq(a(), b())]));
        }
        Op::Ge => {
            out.push((Op::Le, vec![b(), a()]));
            out.push((Op::Not, vec![Term::lt(a(), b())]));
            out.push((Op::Not, vec![Term::gt(b(), a())]));
        }
        Op::Lt => {
            out.push((Op::Gt, vec![b(), a()]));
            out.push((Op::Not, vec![Term::ge(a(), b())]));
            out.push((Op::Not, vec![Term::le(b(), a())]));
            out.push((Op::Le, vec![Term::add(a(), Term::int(1)), b()]));
        }
        Op::Gt => {
            out.push((Op::Lt, vec![b(), a()]));
            out.push((Op::Not, vec![Term::le(a(), b())]));
            out.push((Op::Not, vec![Term::ge(b(), a())]));
            out.push((Op::Le, vec![Term::add(b(), Term::int(1)), a()]));
        }
        Op::Eq => {
            out.push((Op::Eq, vec![b(), a()]));
            if args[0].sort() == Sort::Int {
                out.push((Op::And, vec![Term::le(a(), b()), Term::le(b(), a())]));
            }
        }
        Op::Not => {
            if let Term::Apply(Op::Not, inner) = &args[0] {
                shapes_inner(&inner[0], out);
            } else {
                let n = negate(&args[0]);
                if !matches!(n, Term::Apply(Op::Not, _)) {
                    shapes_inner(&n, out);
                }
            }
        }
        Op::And => {
            let negs = args.iter().map(|x| Term::not(x.clone())).collect();
            out.push((Op::Not, vec![Term::or(negs)]));
        }
        Op::Or => {
            let negs = args.iter().map(|x| Term::not(x.clone())).collect();
            out.push((Op::Not, vec![Term::and(negs)]));
            let rest = if args.len() == 2 { b() } else { Term::or(args[1..].to_vec()) };
            out.push((Op::Implies, vec![Term::not(a()), rest]));
        }
        Op::Implies => {
            out.push((Op::Or, vec![Term::not(a()), b()]));
            out.push((Op::Not, vec![Term::and(vec![a(), Term::not(b())])]));
        }
        Op::Ite => out.push((Op::Ite, vec![Term::not(a()), args[2].clone(), b()])),
    }
}

fn shapes_inner(t: &Term, out: &mut Vec<(Op, Vec<Term>)>) {
    match t {
        Term::Apply(op, args) => shapes_apply(*op, args, out),
        _ => out.extend(shapes(t)),
    }
}

/// Positive and (negated) negative parts of a sum, so `s = pos - neg`.
fn split_signs(s: &LinSum) -> (LinSum, LinSum) {
    let mut pos = LinSum::constant(BigInt::zero());
    let mut neg = LinSum::constant(BigInt::zero());
    for (b, c) in &s.terms {
        if c.is_positive() {
            pos.terms.insert(b.clone(), c.clone());
        } else {
            neg.terms.insert(b.clone(), -c);
        }
    }
    if s.constant.is_positive() {
        pos.constant = s.constant.clone();
    } else {
        neg.constant = -&s.constant;
    }
    (pos, neg)
}

/// `(l, r)` with `l ⋈ r` equivalent to `a ⋈ b` and no negative coefficients.
fn balanced(a: &Term, b: &Term) -> (Term, Term) {
    let d = LinSum::of(&Term::sub(b.clone(), a.clone()));
    let (pos, neg) = split_signs(&d);
    (neg.to_term(), pos.to_term())
}

pub fn rcon(t: &Term, dt: usize, state: &mut ReconState<'_>) -> (Term, Vec<Obligation>) {
    state.rcon(t, dt)
}

/// A term conforming to the start datatype, equivalent to `l`'s body.
pub fn reconstruct_solution(l: &Lambda, emb: &GrammarEmbedding, limits: &Limits) -> Result<Outcome, EngineError> {
    let solved = |body: Term, rounds: usize| {
        Outcome::Solved(Solution {
            size: body.size(),
            program: emb.conforms(&body, &emb.start),
            lambda: Lambda::new(l.params.clone(), body),
            strategy: Strategy::Si,
            iterations: rounds,
            grammar_checked: true,
        })
    };
    if emb.conforms(&l.body, &emb.start).is_some() {
        return Ok(solved(l.body.clone(), 0));
    }
    let dt = emb.start_index();
    let mut st = ReconState::new(emb);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let (s, u) = st.rcon(&l.body, dt);
        if u.is_empty() {
            return Ok(solved(s, rounds));
        }
        st.pending = u.into_iter().collect();
        st.pending.insert((normalize(&l.body), dt));
        loop {
            if limits.cancelled() {
                return Ok(Outcome::ResourceOut(Resource::Cancelled));
            }
            if st.enumerated >= limits.recon_values {
                return Ok(Outcome::ResourceOut(Resource::Reconstruction));
            }
            let dts: BTreeSet<usize> = st
                .pending
                .iter()
                .map(|(_, d)| *d)
                .filter(|d| !st.exhausted.contains(d))
                .collect();
            if dts.is_empty() {
                return Ok(Outcome::ResourceOut(Resource::Reconstruction));
            }
            if st.enumerate_round(&dts) {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::tests::example2;

    fn x(n: &str) -> Term {
        Term::int_var(n)
    }

    #[test]
    fn doubled_variable_needs_enumeration() {
        let emb = example2();
        let mut st = ReconState::new(&emb);
        let two_x2 = Term::mul(2, x("x2"));
        let (s, u) = rcon(&two_x2, 0, &mut st);
        assert_eq!(s, two_x2);
        assert_eq!(u, vec![(normalize(&two_x2), 0)]);
        let (s, u) = rcon(&Term::add(x("x1"), two_x2.clone()), 0, &mut st);
        assert_eq!(s, Term::add(x("x1"), two_x2.clone()));
        assert_eq!(u, vec![(normalize(&two_x2), 0)]);
    }

    #[test]
    fn example_three() {
        let emb = example2();
        let l = Lambda::new(
            emb.params.clone(),
            Term::add(x("x1"), Term::mul(2, x("x2"))),
        );
        match reconstruct_solution(&l, &emb, &Limits::default()).unwrap() {
            Outcome::Solved(s) => {
                assert_eq!(s.lambda.body, Term::add(x("x1"), Term::add(x("x2"), x("x2"))));
                assert!(s.program.is_some());
            }
            o => panic!("{:?}", o),
        }
    }

    #[test]
    fn comparison_is_flipped() {
        let emb = example2();
        let body = Term::ite(Term::ge(x("x2"), x("x1")), x("x2"), x("x1"));
        let l = Lambda::new(emb.params.clone(), body.clone());
        match reconstruct_solution(&l, &emb, &Limits::default()).unwrap() {
            Outcome::Solved(s) => {
                assert_eq!(s.lambda.body, Term::ite(Term::le(x("x1"), x("x2")), x("x2"), x("x1")));
            }
            o => panic!("{:?}", o),
        }
    }

    #[test]
    fn known_terms_are_consistent() {
        let emb = example2();
        let mut st = ReconState::new(&emb);
        let t = Term::add(x("x1"), Term::mul(3, x("x2")));
        let l = Lambda::new(emb.params.clone(), t);
        assert!(matches!(
            reconstruct_solution(&l, &emb, &Limits::default()).unwrap(),
            Outcome::Solved(_)
        ));
        let _ = st.rcon(&Term::sub(x("x1"), Term::int(2)), 0);
        for ((nf, dt), s) in st.known() {
            assert_eq!(&normalize(s), nf);
            assert!(emb.conforms(s, &emb.datatypes[*dt].sort).is_some());
        }
    }
}
