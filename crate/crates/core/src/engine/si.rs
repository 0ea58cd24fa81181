//! Counterexample-guided quantifier instantiation for single-invocation
//! conjectures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use super::{fresh, theory_outcome, EngineError, Limits, Observer, Outcome, Resource, Solution, Strategy, TraceEvent};
use crate::normal::{normalize, LinSum, NormalTerm};
use crate::problem::{SynthProblem, Target};
use crate::simplify::simplify_solution;
use crate::term::{eval_ground, substitute, Assignment, Lambda, Op, Sort, Term};
use crate::theory::{check_sat_with, CheckResult, GroundQuery};

/// `∃f ∀x̄. P` rewritten as `∀x̄ ∃y. Q[x̄, y]`, where every call of `f` in
/// `P` was `f(x̄)` and became `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleInvocationSpec {
    pub q: Term,
    pub y: String,
    pub ret: Sort,
    /// The invocation arguments, in call order.
    pub args: Vec<(String, Sort)>,
    pub target: Target,
}

impl SingleInvocationSpec {
    /// `Q[x̄, t]`.
    pub fn instance(&self, t: &Term) -> Term {
        let mut m = BTreeMap::new();
        m.insert(self.y.clone(), t.clone());
        substitute(&self.q, &m)
    }
}

/// Some when every call of the target has the same arguments, pairwise
/// distinct universal variables, and no other universal occurs.
pub fn detect_single_invocation(p: &SynthProblem) -> Option<SingleInvocationSpec> {
    let mut tuple: Option<Vec<(String, Sort)>> = None;
    let mut ok = true;
    for c in &p.constraints {
        c.visit(&mut |t| {
            let args = match t {
                Term::Call(n, _, args) if *n == p.target.name => args,
                _ => return,
            };
            let mut vars = Vec::new();
            for a in args {
                match a {
                    Term::Var(n, s) if !vars.iter().any(|(m, _): &(String, Sort)| m == n) => {
                        vars.push((n.clone(), s.clone()))
                    }
                    _ => ok = false,
                }
            }
            match &tuple {
                None => tuple = Some(vars),
                Some(prev) if *prev == vars => {}
                Some(_) => ok = false,
            }
        });
    }
    let args = tuple?;
    if !ok || args.len() != p.target.params.len() {
        return None;
    }
    let conj = p.conjecture();
    for (v, _) in &p.universals {
        if conj.contains_var(v) && !args.iter().any(|(a, _)| a == v) {
            return None;
        }
    }
    let y = fresh("y");
    let target = &p.target;
    let q = conj.map_bottom_up(&mut |t| match t {
        Term::Call(ref n, ref s, _) if *n == target.name => Term::Var(y.clone(), s.clone()),
        other => other,
    });
    Some(SingleInvocationSpec {
        q,
        y,
        ret: p.target.ret.clone(),
        args,
        target: p.target.clone(),
    })
}

/// The instantiation heuristic found no term it has not already used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted;

/// Lemmas and instances of one run of the instantiation loop.
#[derive(Clone, Debug)]
pub struct SiState {
    /// Constant standing for `y` in the current model.
    pub e: String,
    /// Guard of `Q[k̄, e]`.
    pub g: String,
    /// Chosen instances `t1 .. tp`, pairwise distinct modulo normalization.
    pub instances: Vec<Term>,
    seen: BTreeSet<NormalTerm>,
    pool: Vec<Term>,
}

impl SiState {
    pub fn new(spec: &SingleInvocationSpec) -> Self {
        SiState {
            e: fresh("e"),
            g: fresh("G"),
            instances: Vec::new(),
            seen: BTreeSet::new(),
            pool: instantiation_pool(spec),
        }
    }

    pub fn pool(&self) -> &[Term] {
        &self.pool
    }

    pub fn add_instance(&mut self, t: Term) -> bool {
        if !self.seen.insert(normalize(&t)) {
            return false;
        }
        self.instances.push(t);
        true
    }

    /// `Γ ∧ G`, or only the instance lemmas `¬Q[k̄, ti]`.
    pub fn query(&self, spec: &SingleInvocationSpec, guarded: bool) -> GroundQuery {
        let mut q = GroundQuery::new(spec.args.clone());
        for t in &self.instances {
            q.assert(Term::not(spec.instance(t)));
        }
        if guarded {
            q.declare(self.e.clone(), spec.ret.clone());
            q.declare(self.g.clone(), Sort::Bool);
            let e = Term::var(self.e.clone(), spec.ret.clone());
            q.assert(Term::implies(Term::bool_var(self.g.clone()), spec.instance(&e)));
            q.assert(Term::bool_var(self.g.clone()));
        }
        q
    }
}

/// Candidate instances: maximal `y`-free subterms of `Q` with the return
/// sort, the invocation arguments, then bounds on `y` read off the atoms
/// of `Q` where `y` has a unit coefficient.
fn instantiation_pool(spec: &SingleInvocationSpec) -> Vec<Term> {
    let mut out = Vec::new();
    maximal_free(&spec.q, &spec.y, &spec.ret, &mut out);
    for (n, s) in &spec.args {
        if *s == spec.ret {
            out.push(Term::var(n.clone(), s.clone()));
        }
    }
    if spec.ret == Sort::Int {
        let yv = Term::int_var(spec.y.clone());
        normalize(&spec.q).term().visit(&mut |t| {
            if let Some(b) = isolate(t, &yv, &spec.y) {
                out.push(b);
            }
        });
    }
    let mut seen = BTreeSet::new();
    out.retain(|t| seen.insert(normalize(t)));
    out
}

fn maximal_free(t: &Term, y: &str, sort: &Sort, out: &mut Vec<Term>) {
    if !t.contains_var(y) && t.sort() == *sort {
        out.push(t.clone());
        return;
    }
    for c in t.children() {
        maximal_free(c, y, sort, out);
    }
}

/// For a normal-form atom `c <= Σ` or `Σ = c` with `±y` in `Σ`, the term
/// `y` is compared against.
fn isolate(atom: &Term, yv: &Term, y: &str) -> Option<Term> {
    let (sum, c) = match atom {
        Term::Apply(Op::Le, a) => (&a[1], &a[0]),
        Term::Apply(Op::Eq, a) if a[0].sort() == Sort::Int => (&a[0], &a[1]),
        _ => return None,
    };
    let mut s = LinSum::of(sum);
    let k = s.terms.remove(yv)?;
    if !k.abs().is_one() || s.terms.keys().any(|b| b.contains_var(y)) {
        return None;
    }
    // k*y + rest (op) c  =>  y (op') k*(c - rest)
    s.constant -= c.as_int()?;
    let bound = if k.is_positive() {
        LinSum::of(&Term::neg(s.to_term()))
    } else {
        s
    };
    Some(bound.to_term())
}

/// A term from the pool (or the literal) whose value in `model` equals the
/// value of `e`, not already among the instances.
pub fn select_instantiation_term(
    state: &SiState,
    model: &Assignment,
    _spec: &SingleInvocationSpec,
) -> Result<Term, Exhausted> {
    let target = model.get(&state.e).ok_or(Exhausted)?;
    for t in &state.pool {
        if eval_ground(t, model).as_ref() == Ok(target) && !state.seen.contains(&normalize(t)) {
            return Ok(t.clone());
        }
    }
    let lit = target.to_term();
    if state.seen.contains(&normalize(&lit)) {
        return Err(Exhausted);
    }
    Ok(lit)
}

/// `λx̄. ite(Q[x̄,t1], t1, ite(..., ite(Q[x̄,tp-1], tp-1, tp)))`, over the
/// target's parameters and simplified.
pub fn build_ite_solution(instances: &[Term], spec: &SingleInvocationSpec) -> Lambda {
    let (last, init) = instances.split_last().expect("at least one instance");
    let mut body = last.clone();
    for t in init.iter().rev() {
        body = Term::ite(spec.instance(t), t.clone(), body);
    }
    let rename: BTreeMap<String, Term> = spec
        .args
        .iter()
        .zip(&spec.target.params)
        .map(|((a, _), (p, s))| (a.clone(), Term::var(p.clone(), s.clone())))
        .collect();
    let body = substitute(&body, &rename);
    simplify_solution(&Lambda::new(spec.target.params.clone(), body))
}

pub fn solve_si(spec: &SingleInvocationSpec, limits: &Limits, obs: &mut dyn Observer) -> Result<Outcome, EngineError> {
    let mut st = SiState::new(spec);
    for _ in 0..limits.si_iterations {
        if limits.cancelled() {
            return Ok(Outcome::ResourceOut(Resource::Cancelled));
        }
        let q = st.query(spec, true);
        let model = match check_sat_with(&q, &mut limits.budget()) {
            Err(e) => return theory_outcome(e),
            Ok(CheckResult::Sat(m)) => m,
            Ok(CheckResult::Unsat) => return finish(spec, &st, limits),
        };
        let t = match select_instantiation_term(&st, &model, spec) {
            Ok(t) => t,
            Err(Exhausted) => return Ok(Outcome::ResourceOut(Resource::Stalled)),
        };
        obs.event(&TraceEvent::Instance {
            e: model.get(&st.e).cloned().expect("model is total"),
            instance: t.clone(),
        });
        st.add_instance(t);
    }
    Ok(Outcome::ResourceOut(Resource::Iterations))
}

/// `Γ ∧ G` is unsatisfiable: either the instances alone are (a solution),
/// or some input admits no output at all.
fn finish(spec: &SingleInvocationSpec, st: &SiState, limits: &Limits) -> Result<Outcome, EngineError> {
    if st.instances.is_empty() {
        return Ok(Outcome::NoSolution);
    }
    match check_sat_with(&st.query(spec, false), &mut limits.budget()) {
        Err(e) => theory_outcome(e),
        Ok(CheckResult::Sat(_)) => Ok(Outcome::NoSolution),
        Ok(CheckResult::Unsat) => {
            let lambda = build_ite_solution(&st.instances, spec);
            Ok(Outcome::Solved(Solution {
                size: lambda.body.size(),
                lambda,
                strategy: Strategy::Si,
                iterations: st.instances.len(),
                program: None,
                grammar_checked: false,
            }))
        }
    }
}
