//! Enumerative counterexample-guided inductive synthesis.

use alloc::vec::Vec;

use super::{fresh, theory_outcome, EngineError, Limits, Observer, Outcome, Resource, Solution, Strategy, TraceEvent};
use crate::grammar::{DatatypeValue, GrammarEmbedding, Next, StreamEnd, Enumerator};
use crate::problem::SynthProblem;
use crate::term::{Assignment, Lambda, Term, Value};
use crate::theory::find_counterexample_with;

/// `P` with every call of the target replaced by `ev(e, args)`.
fn deep_embedding(p: &SynthProblem, emb: &GrammarEmbedding, e: &str) -> Term {
    let start = emb.start.clone();
    let ret = p.target.ret.clone();
    p.conjecture().map_bottom_up(&mut |t| match t {
        Term::Call(n, _, args) if n == p.target.name => Term::Eval(
            start.clone(),
            ret.clone(),
            alloc::boxed::Box::new(Term::var(e, start.clone())),
            args,
        ),
        other => other,
    })
}

/// True when `program` satisfies the embedded conjecture on every point.
pub fn points_filter(
    p_ev: &Term,
    e: &str,
    emb: &GrammarEmbedding,
    program: &DatatypeValue,
    points: &[Assignment],
) -> Result<bool, EngineError> {
    for pt in points {
        let mut a = pt.clone();
        a.insert(e, Value::Datatype(program.clone()));
        if emb.eval_term(p_ev, &a)? != Value::Bool(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Propose grammar values in size order; each one consistent with the
/// counterexamples so far is verified, and refuted ones add a point.
pub fn solve_cegis(
    p: &SynthProblem,
    emb: &GrammarEmbedding,
    limits: &Limits,
    obs: &mut dyn Observer,
) -> Result<Outcome, EngineError> {
    let e = fresh("e");
    let p_ev = deep_embedding(p, emb, &e);
    let names: Vec<&str> = p.universals.iter().map(|(n, _)| n.as_str()).collect();
    let mut points: Vec<Assignment> = Vec::new();
    let mut stream = Enumerator::new(emb).with_cap(limits.max_size);
    let start = emb.start_index();
    let mut proposed = 0u64;
    let mut iterations = 0usize;
    loop {
        if limits.cancelled() {
            return Ok(Outcome::ResourceOut(Resource::Cancelled));
        }
        let d = match stream.next_of(start) {
            Next::Value(d) => d,
            Next::End(StreamEnd::Exhausted) => return Ok(Outcome::NoSolution),
            Next::End(StreamEnd::Capped) => return Ok(Outcome::ResourceOut(Resource::SizeBound)),
        };
        proposed += 1;
        if proposed > limits.candidates {
            return Ok(Outcome::ResourceOut(Resource::Candidates));
        }
        if !points_filter(&p_ev, &e, emb, &d, &points)? {
            continue;
        }
        iterations += 1;
        let lambda = Lambda::new(p.target.params.clone(), emb.analogue(&d));
        let cex = match find_counterexample_with(&lambda, p, &mut limits.budget()) {
            Ok(c) => c.map(|a| a.restrict(names.iter().copied())),
            Err(err) => return theory_outcome(err),
        };
        obs.event(&TraceEvent::Candidate {
            program: d.clone(),
            cex: cex.clone(),
        });
        match cex {
            None => {
                return Ok(Outcome::Solved(Solution {
                    size: lambda.body.size(),
                    lambda,
                    strategy: Strategy::Cegis,
                    iterations,
                    program: Some(d),
                    grammar_checked: true,
                }))
            }
            Some(pt) => points.push(pt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Silent;
    use crate::grammar::{embed, term_size};
    use crate::problem::{GrammarSpec, Logic, Nonterminal, Production, Target};
    use crate::term::{Op, Sort};
    use alloc::string::String;
    use alloc::vec;

    fn zero_one() -> GrammarSpec {
        GrammarSpec {
            nonterminals: vec![Nonterminal {
                name: "S".into(),
                sort: Sort::Int,
                productions: vec![Production::Int(0.into()), Production::Int(1.into())],
            }],
        }
    }

    fn constant_problem(k: i64, g: GrammarSpec) -> SynthProblem {
        let target = Target {
            name: "f".into(),
            params: vec![],
            ret: Sort::Int,
        };
        SynthProblem {
            logic: Logic::Lia,
            universals: vec![],
            constraints: vec![Term::eq(target.call(vec![]), Term::int(k))],
            grammar: Some(g),
            target,
        }
    }

    #[test]
    fn finite_grammar_refutes() {
        let p = constant_problem(2, zero_one());
        let emb = embed(p.grammar.as_ref().unwrap(), &p.target.params).unwrap();
        assert_eq!(solve_cegis(&p, &emb, &Limits::default(), &mut Silent).unwrap(), Outcome::NoSolution);
    }

    #[test]
    fn finds_smallest_sum() {
        let mut g = zero_one();
        g.nonterminals[0]
            .productions
            .push(Production::Op(Op::Add, vec![String::from("S"), String::from("S")]));
        let p = constant_problem(2, g);
        let emb = embed(p.grammar.as_ref().unwrap(), &p.target.params).unwrap();
        let mut trace = Vec::new();
        match solve_cegis(&p, &emb, &Limits::default(), &mut trace).unwrap() {
            Outcome::Solved(s) => {
                assert_eq!(term_size(s.program.as_ref().unwrap()), 1);
                assert_eq!(s.lambda.body, Term::add(Term::int(1), Term::int(1)));
            }
            o => panic!("{:?}", o),
        }
        // No constraint depends on inputs, so only the accepted candidate
        // and the ones refuted before any point existed are verified.
        assert!(!trace.is_empty());
    }

    #[test]
    fn size_cap_reports_resource_out() {
        let mut g = zero_one();
        g.nonterminals[0]
            .productions
            .push(Production::Op(Op::Add, vec![String::from("S"), String::from("S")]));
        let p = constant_problem(40, g);
        let emb = embed(p.grammar.as_ref().unwrap(), &p.target.params).unwrap();
        let limits = Limits {
            max_size: 3,
            ..Limits::default()
        };
        assert_eq!(
            solve_cegis(&p, &emb, &limits, &mut Silent).unwrap(),
            Outcome::ResourceOut(Resource::SizeBound)
        );
    }
}
