use std::path::PathBuf;

use proptest::prelude::*;
use sygus_forge::{gen_max_n, parse, print_problem, ParseError};
use sygus_forge_core::{Logic, Op, Sort, SynthProblem, Target, Term};

fn corpus() -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sl"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_is_a_fixpoint() {
    let files = corpus();
    assert!(files.len() >= 25);
    for (path, text) in files {
        let p = parse(&text).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
        let printed = print_problem(&p);
        assert_eq!(parse(&printed).unwrap(), p, "{}", path.display());
        assert_eq!(print_problem(&parse(&printed).unwrap()), printed);
    }
}

#[test]
fn generated_benchmarks_are_fixpoints() {
    for n in 2..=12 {
        let text = gen_max_n(n);
        let p = parse(&text).unwrap();
        assert_eq!(p.constraints.len(), n + 1);
        assert_eq!(print_problem(&p), text);
    }
}

#[test]
fn unsupported_productions_are_located() {
    let text = "(set-logic LIA)\n(synth-fun f ((x Int)) Int\n  ((S Int (x (div S S)))))\n(check-synth)";
    match parse(text) {
        Err(ParseError::UnsupportedFeature { line, col, name }) => {
            assert_eq!((line, col, name.as_str()), (3, 15, "div"));
        }
        other => panic!("{:?}", other),
    }
}

fn within(e: &ParseError, text: &str) -> bool {
    let p = e.pos();
    let lines = text.split('\n').count();
    p.line >= 1 && p.col >= 1 && p.line <= lines
}

fn int_term(call: bool) -> BoxedStrategy<Term> {
    let mut leaves = vec![
        prop_oneof![Just("x"), Just("y")].prop_map(Term::int_var).boxed(),
        (-20i64..=20).prop_map(Term::int).boxed(),
    ];
    if call {
        leaves.push(Just(Term::Call("f".into(), Sort::Int, vec![Term::int_var("x"), Term::int_var("y")])).boxed());
    }
    proptest::strategy::Union::new(leaves)
        .prop_recursive(3, 20, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Term::app(Op::Add, v)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sub(a, b)),
                inner.clone().prop_map(|a| match a {
                    Term::Int(_) => Term::sub(Term::int(0), a),
                    a => Term::neg(a),
                }),
                (-4i64..=4, inner.clone()).prop_map(|(c, a)| Term::mul(c, a)),
            ]
        })
        .boxed()
}

fn constraint() -> impl Strategy<Value = Term> {
    let atom = (0..5usize, int_term(true), int_term(true)).prop_map(|(k, a, b)| {
        let op = [Op::Le, Op::Lt, Op::Ge, Op::Gt, Op::Eq][k];
        Term::app(op, vec![a, b])
    });
    atom.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Term::app(Op::And, v)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Term::app(Op::Or, v)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::implies(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        if let Err(e) = parse(&text) {
            prop_assert!(within(&e, &text), "{:?}", e);
        }
    }

    #[test]
    fn mutated_corpus_never_panics(idx in 0usize..1000, cut in 0usize..4000, insert in "[()a-z0-9 ;|#:\\-\n]{0,6}") {
        let files = corpus();
        let (_, text) = &files[idx % files.len()];
        let mut at = cut % (text.len() + 1);
        while !text.is_char_boundary(at) {
            at -= 1;
        }
        let mutated = format!("{}{}{}", &text[..at], insert, &text[at..]);
        if let Err(e) = parse(&mutated) {
            prop_assert!(within(&e, &mutated), "{:?}", e);
        }
        let truncated = &text[..at];
        if let Err(e) = parse(truncated) {
            prop_assert!(within(&e, truncated), "{:?}", e);
        }
    }

    #[test]
    fn printed_problems_parse_back(cs in prop::collection::vec(constraint(), 0..4)) {
        let p = SynthProblem {
            logic: Logic::Lia,
            target: Target {
                name: "f".into(),
                params: vec![("a".into(), Sort::Int), ("b".into(), Sort::Int)],
                ret: Sort::Int,
            },
            universals: vec![("x".into(), Sort::Int), ("y".into(), Sort::Int)],
            constraints: cs,
            grammar: None,
        };
        prop_assert_eq!(parse(&print_problem(&p)), Ok(p));
    }
}
