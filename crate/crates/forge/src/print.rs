//! Surface syntax for problems and solutions.

use std::fmt::Write;

use sygus_forge_core::{GrammarSpec, Lambda, Op, Production, SynthProblem, Term};

fn params(ps: &[(String, sygus_forge_core::Sort)]) -> String {
    let items: Vec<String> = ps.iter().map(|(n, s)| format!("({} {})", n, s)).collect();
    format!("({})", items.join(" "))
}

fn production(p: &Production) -> String {
    match p {
        Production::Param(n) => n.clone(),
        Production::Int(v) => Term::Int(v.clone()).to_string(),
        Production::Bool(b) => b.to_string(),
        Production::Op(op, args) => {
            let sym = if *op == Op::Neg { "-" } else { op.symbol() };
            format!("({} {})", sym, args.join(" "))
        }
        Production::Unsupported(text) => text.clone(),
    }
}

fn grammar(g: &GrammarSpec) -> String {
    let mut out = String::new();
    for (i, nt) in g.nonterminals.iter().enumerate() {
        let prods: Vec<String> = nt.productions.iter().map(production).collect();
        out.push_str(if i == 0 { "  ((" } else { "\n   (" });
        let _ = write!(out, "{} {} ({}))", nt.name, nt.sort, prods.join(" "));
    }
    out.push(')');
    out
}

/// Canonical text of a problem; parsing it gives the problem back.
pub fn print_problem(p: &SynthProblem) -> String {
    let mut out = String::from("(set-logic LIA)\n");
    let t = &p.target;
    let _ = write!(out, "(synth-fun {} {} {}", t.name, params(&t.params), t.ret);
    if let Some(g) = &p.grammar {
        out.push('\n');
        out.push_str(&grammar(g));
    }
    out.push_str(")\n");
    if !p.universals.is_empty() {
        let decls: Vec<String> = p.universals.iter().map(|(n, s)| format!("(declare-var {} {})", n, s)).collect();
        let _ = writeln!(out, "{}", decls.join(" "));
    }
    for c in &p.constraints {
        let _ = writeln!(out, "(constraint {})", c);
    }
    out.push_str("(check-synth)\n");
    out
}

/// The `(define-fun ...)` line for a solution of `p`.
pub fn print_solution(p: &SynthProblem, s: &Lambda) -> String {
    format!("(define-fun {} {} {} {})", p.target.name, params(&s.params), p.target.ret, s.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use sygus_forge_core::Sort;

    #[test]
    fn max2_solution_line() {
        let p = parse(crate::gen::gen_max_n(2).as_str()).unwrap();
        let x1 = Term::int_var("x1");
        let x2 = Term::int_var("x2");
        let l = Lambda::new(
            p.target.params.clone(),
            Term::ite(Term::ge(x2.clone(), x1.clone()), x2, x1),
        );
        assert_eq!(
            print_solution(&p, &l),
            "(define-fun max2 ((x1 Int) (x2 Int)) Int (ite (>= x2 x1) x2 x1))"
        );
    }

    #[test]
    fn constant_solution_line() {
        let p = parse("(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) (constraint (= (f x) 0)) (check-synth)").unwrap();
        let l = Lambda::new(vec![("x".into(), Sort::Int)], Term::int(0));
        assert_eq!(print_solution(&p, &l), "(define-fun f ((x Int)) Int 0)");
    }

    #[test]
    fn reference_input_is_a_fixpoint() {
        let text = crate::gen::gen_max_n(2);
        let p = parse(&text).unwrap();
        assert_eq!(parse(&print_problem(&p)).unwrap(), p);
    }
}
