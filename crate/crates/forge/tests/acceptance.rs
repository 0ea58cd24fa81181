//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sygus_forge::{gen_max_n, parse, print_problem};
use sygus_forge_core::engine::{build_ite_solution, detect_single_invocation, Silent, TraceEvent};
use sygus_forge_core::reconstruct::reconstruct_solution;
use sygus_forge_core::term::holds;
use sygus_forge_core::theory::{check_sat, find_counterexample, CheckResult, GroundQuery};
use sygus_forge_core::{
    embed, normalize, solve, term_size, Assignment, GrammarSpec, Lambda, Limits, Logic, Nonterminal, Op, Outcome,
    Production, Sort, Strategy, SynthProblem, Target, Term, Value,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_of(xs: &[i64]) -> i64 {
    *xs.iter().max().unwrap()
}

fn eval_int(l: &Lambda, xs: &[i64]) -> Result<i64, String> {
    let vs: Vec<Value> = xs.iter().map(|&x| Value::int(x)).collect();
    match l.eval(&vs) {
        Ok(Value::Int(v)) => i64::try_from(v).map_err(|_| "overflow".to_string()),
        other => Err(format!("{:?}", other)),
    }
}

fn solved(o: Outcome) -> Result<Lambda, String> {
    match o {
        Outcome::Solved(s) => Ok(s.lambda),
        other => Err(format!("{:?}", other)),
    }
}

/// Calls `f` on every point of `[lo, hi]^n`.
fn for_box(n: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64]) -> Result<(), String>) -> Result<(), String> {
    let mut p = vec![lo; n];
    loop {
        f(&p)?;
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            p[i] += 1;
            if p[i] <= hi {
                break;
            }
            p[i] = lo;
            i += 1;
        }
    }
}

fn max2_end_to_end() -> Check {
    let p = parse(&gen_max_n(2)).map_err(|e| e.to_string())?;
    let mut times = Vec::new();
    for s in [Strategy::Si, Strategy::SiR, Strategy::Cegis] {
        let start = Instant::now();
        let l = solved(solve(&p, s, &Limits::default(), &mut Silent).map_err(|e| e.to_string())?)?;
        let t = start.elapsed();
        ensure(t < Duration::from_secs(10), || format!("{} took {:?}", s, t))?;
        for_box(2, -20, 20, |x| {
            let got = eval_int(&l, x)?;
            ensure(got == max_of(x), || format!("{}: {} at {:?} gives {}", s, l.body, x, got))
        })?;
        times.push(format!("{} {:.2}s", s, t.as_secs_f64()));
    }
    Ok(times.join(", "))
}

fn max_n_scaling() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6178);
    let mut notes = Vec::new();
    for n in 2..=5 {
        let p = parse(&gen_max_n(n)).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let l = solved(solve(&p, Strategy::Si, &Limits::default(), &mut Silent).map_err(|e| e.to_string())?)?;
        let t = start.elapsed();
        if n == 5 {
            ensure(t < Duration::from_secs(60), || format!("n=5 took {:?}", t))?;
        }
        let check = |x: &[i64]| {
            let got = eval_int(&l, x)?;
            ensure(got == max_of(x), || format!("n={}: {:?} gives {}", n, x, got))
        };
        for_box(n, -5, 5, check)?;
        for _ in 0..10_000 {
            let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100)).collect();
            check(&x)?;
        }
        notes.push(format!("n={} {:.2}s", n, t.as_secs_f64()));
    }
    notes.push(format!("stretch n=10: {}", stretch_max10()));
    Ok(notes.join(", "))
}

/// Reported, not asserted.
fn stretch_max10() -> String {
    let p = match parse(&gen_max_n(10)) {
        Ok(p) => p,
        Err(e) => return e.to_string(),
    };
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    std::thread::spawn(move || {
        std::thread::sleep(Duration::from_secs(300));
        flag.store(true, Ordering::Relaxed);
    });
    let limits = Limits {
        stop: Some(stop.clone()),
        ..Limits::default()
    };
    let start = Instant::now();
    let r = solve(&p, Strategy::Si, &limits, &mut Silent);
    stop.store(true, Ordering::Relaxed);
    let t = start.elapsed().as_secs_f64();
    match r {
        Ok(Outcome::Solved(s)) => format!("solved in {:.1}s, size {}", t, s.size),
        Ok(other) => format!("{:?} after {:.1}s", other, t),
        Err(e) => format!("error {} after {:.1}s", e, t),
    }
}

/// `Q[x1, x2, y]` from a few random clauses over small linear sides.
fn random_si_body(rng: &mut ChaCha8Rng, call: &Term) -> Term {
    let x1 = Term::int_var("x1");
    let x2 = Term::int_var("x2");
    let side = |rng: &mut ChaCha8Rng| match rng.gen_range(0..7) {
        0 => x1.clone(),
        1 => x2.clone(),
        2 => call.clone(),
        3 => Term::int(rng.gen_range(-3..=3i64)),
        4 => Term::add(x1.clone(), x2.clone()),
        5 => Term::add(call.clone(), Term::int(rng.gen_range(-2..=2i64))),
        _ => Term::sub(x1.clone(), x2.clone()),
    };
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut atoms = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let a = side(rng);
            let b = side(rng);
            let op = [Op::Le, Op::Lt, Op::Ge, Op::Eq][rng.gen_range(0..4)];
            atoms.push(Term::app(op, vec![a, b]));
        }
        clauses.push(Term::or(atoms));
    }
    // Keep the call present even when no clause mentions it.
    clauses.push(Term::or(vec![
        Term::ge(call.clone(), Term::int(0)),
        Term::lt(call.clone(), Term::add(x1, x2)),
    ]));
    Term::and(clauses)
}

fn instance_pool() -> Vec<Term> {
    let x1 = Term::int_var("x1");
    let x2 = Term::int_var("x2");
    let mut out = vec![x1.clone(), x2.clone()];
    out.extend((-3..=3i64).map(Term::int));
    out.push(Term::add(x1.clone(), x2.clone()));
    out.push(Term::sub(x1.clone(), x2.clone()));
    out.push(Term::add(x1.clone(), Term::int(1)));
    out.push(Term::sub(x1, Term::int(1)));
    out.push(Term::add(x2.clone(), Term::int(1)));
    out.push(Term::sub(x2, Term::int(1)));
    out
}

/// Smallest instance set (up to 3 terms) whose negated instances are
/// jointly unsatisfiable.
fn brute_instances(spec: &sygus_forge_core::engine::SingleInvocationSpec) -> Option<Vec<Term>> {
    let pool = instance_pool();
    let unsat = |ts: &[&Term]| {
        let mut q = GroundQuery::new(spec.args.clone());
        for t in ts {
            q.assert(Term::not(spec.instance(t)));
        }
        check_sat(&q) == Ok(CheckResult::Unsat)
    };
    for a in 0..pool.len() {
        if unsat(&[&pool[a]]) {
            return Some(vec![pool[a].clone()]);
        }
    }
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            if unsat(&[&pool[a], &pool[b]]) {
                return Some(vec![pool[a].clone(), pool[b].clone()]);
            }
        }
    }
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            for c in b + 1..pool.len() {
                if unsat(&[&pool[a], &pool[b], &pool[c]]) {
                    return Some(vec![pool[a].clone(), pool[b].clone(), pool[c].clone()]);
                }
            }
        }
    }
    None
}

fn two_var_target(name: &str) -> Target {
    Target {
        name: name.into(),
        params: vec![("a".into(), Sort::Int), ("b".into(), Sort::Int)],
        ret: Sort::Int,
    }
}

fn universals2() -> Vec<(String, Sort)> {
    vec![("x1".into(), Sort::Int), ("x2".into(), Sort::Int)]
}

fn ite_solutions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1735);
    let target = two_var_target("f");
    let call = target.call(vec![Term::int_var("x1"), Term::int_var("x2")]);
    let (mut checked, mut tried) = (0, 0);
    while checked < 120 {
        tried += 1;
        ensure(tried < 5_000, || format!("only {} specs with instance sets", checked))?;
        let body = random_si_body(&mut rng, &call);
        let p = SynthProblem {
            logic: Logic::Lia,
            target: target.clone(),
            universals: universals2(),
            constraints: vec![body.clone()],
            grammar: None,
        };
        let spec = match detect_single_invocation(&p) {
            Some(s) => s,
            None => return Err(format!("not single-invocation: {}", body)),
        };
        let ts = match brute_instances(&spec) {
            Some(ts) => ts,
            None => continue,
        };
        let sol = build_ite_solution(&ts, &spec);
        for_box(2, -8, 8, |x| {
            let y = eval_int(&sol, x)?;
            let mut a = Assignment::new();
            a.insert("x1", Value::int(x[0]));
            a.insert("x2", Value::int(x[1]));
            a.insert(spec.y.clone(), Value::int(y));
            ensure(holds(&spec.q, &a) == Ok(true), || format!("{} fails Q={} at {:?}", sol.body, spec.q, x))
        })?;
        checked += 1;
    }
    Ok(format!("{} specs, {} generated", checked, tried))
}

/// A layered grammar: start over leaves and one level of operators.
fn random_finite_grammar(rng: &mut ChaCha8Rng) -> GrammarSpec {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut leaves = vec![Production::Param("a".into())];
    if rng.gen_bool(0.7) {
        leaves.push(Production::Param("b".into()));
    }
    let mut consts: Vec<i64> = (-1..=2).filter(|_| rng.gen_bool(0.5)).collect();
    if consts.is_empty() {
        consts.push(1);
    }
    leaves.extend(consts.into_iter().map(|c| Production::Int(c.into())));
    let mut start = leaves.clone();
    let ops = [Op::Add, Op::Sub];
    for op in ops {
        if rng.gen_bool(0.6) {
            start.push(Production::Op(op, s(&["T", "T"])));
        }
    }
    let mut nts = vec![];
    let with_ite = rng.gen_bool(0.4);
    if with_ite {
        start.push(Production::Op(Op::Ite, s(&["C", "T", "T"])));
    }
    nts.push(Nonterminal {
        name: "S".into(),
        sort: Sort::Int,
        productions: start,
    });
    nts.push(Nonterminal {
        name: "T".into(),
        sort: Sort::Int,
        productions: leaves,
    });
    if with_ite {
        nts.push(Nonterminal {
            name: "C".into(),
            sort: Sort::Bool,
            productions: vec![Production::Op(Op::Le, s(&["T", "T"]))],
        });
    }
    GrammarSpec { nonterminals: nts }
}

/// Every term of a non-recursive grammar with its count of operator nodes.
fn all_terms(g: &GrammarSpec, nt: &str, params: &[(String, Sort)]) -> Vec<(Term, usize)> {
    let n = g.nonterminal(nt).expect("declared nonterminal");
    let mut out = Vec::new();
    for p in &n.productions {
        match p {
            Production::Param(x) => {
                let s = params.iter().find(|(q, _)| q == x).unwrap().1.clone();
                out.push((Term::var(x.clone(), s), 0));
            }
            Production::Int(v) => out.push((Term::Int(v.clone()), 0)),
            Production::Bool(b) => out.push((Term::Bool(*b), 0)),
            Production::Op(op, args) => {
                let mut acc: Vec<(Vec<Term>, usize)> = vec![(vec![], 1)];
                for a in args {
                    let sub = all_terms(g, a, params);
                    let mut next = Vec::new();
                    for (ts, k) in &acc {
                        for (t, j) in &sub {
                            let mut ts = ts.clone();
                            ts.push(t.clone());
                            next.push((ts, k + j));
                        }
                    }
                    acc = next;
                }
                out.extend(acc.into_iter().map(|(ts, k)| (Term::app(*op, ts), k)));
            }
            Production::Unsupported(_) => unreachable!(),
        }
    }
    out
}

/// Smallest size of a grammar term satisfying `p`, or None.
fn oracle_min_size(p: &SynthProblem) -> Option<usize> {
    let g = p.grammar.as_ref().unwrap();
    let mut terms = all_terms(g, &g.nonterminals[0].name, &p.target.params);
    terms.sort_by_key(|(_, k)| *k);
    terms
        .into_iter()
        .find(|(t, _)| find_counterexample(&Lambda::new(p.target.params.clone(), t.clone()), p) == Ok(None))
        .map(|(_, k)| k)
}

/// A random spec: an equation with a linear right side, or a pair of bounds.
fn random_spec(rng: &mut ChaCha8Rng, call: &Term) -> Vec<Term> {
    let x1 = Term::int_var("x1");
    let x2 = Term::int_var("x2");
    let lin = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(-1..=2i64);
        let b = rng.gen_range(-1..=2i64);
        let c = rng.gen_range(-2..=2i64);
        Term::app(
            Op::Add,
            vec![Term::mul(a, x1.clone()), Term::mul(b, x2.clone()), Term::int(c)],
        )
    };
    match rng.gen_range(0..3) {
        0 | 1 => vec![Term::eq(call.clone(), lin(rng))],
        _ => vec![Term::ge(call.clone(), lin(rng)), Term::le(call.clone(), lin(rng))],
    }
}

struct FiniteCase {
    p: SynthProblem,
    oracle: Option<usize>,
}

fn finite_cases() -> Vec<FiniteCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1417e);
    let target = two_var_target("f");
    let call = target.call(vec![Term::int_var("x1"), Term::int_var("x2")]);
    let mut out = Vec::new();
    let (mut sat, mut unsat) = (0, 0);
    while sat < 25 || unsat < 12 {
        let g = random_finite_grammar(&mut rng);
        let p = SynthProblem {
            logic: Logic::Lia,
            target: target.clone(),
            universals: universals2(),
            constraints: random_spec(&mut rng, &call),
            grammar: Some(g),
        };
        let oracle = oracle_min_size(&p);
        match oracle {
            Some(_) if sat < 25 => sat += 1,
            None if unsat < 12 => unsat += 1,
            _ => continue,
        }
        out.push(FiniteCase { p, oracle });
    }
    out
}

fn minimality(cases: &[FiniteCase]) -> Check {
    let mut n = 0;
    for c in cases {
        let want = match c.oracle {
            Some(k) => k,
            None => continue,
        };
        match solve(&c.p, Strategy::Cegis, &Limits::default(), &mut Silent).map_err(|e| e.to_string())? {
            Outcome::Solved(s) => {
                let got = s.program.as_ref().map(term_size);
                ensure(got == Some(want), || {
                    format!("{}: size {:?}, oracle {}", s.lambda.body, got, want)
                })?;
            }
            other => return Err(format!("{:?} where the oracle finds size {}", other, want)),
        }
        n += 1;
    }
    ensure(n >= 20, || format!("only {} solvable problems", n))?;
    Ok(format!("{} problems", n))
}

fn refutation(cases: &[FiniteCase]) -> Check {
    let mut f2 = SynthProblem {
        logic: Logic::Lia,
        target: Target {
            name: "f".into(),
            params: vec![],
            ret: Sort::Int,
        },
        universals: vec![],
        constraints: vec![],
        grammar: Some(GrammarSpec {
            nonterminals: vec![Nonterminal {
                name: "S".into(),
                sort: Sort::Int,
                productions: vec![Production::Int(0.into()), Production::Int(1.into())],
            }],
        }),
    };
    f2.constraints.push(Term::eq(f2.target.call(vec![]), Term::int(2)));
    let f2_oracle = oracle_min_size(&f2);
    ensure(f2_oracle.is_none(), || "oracle solves f() = 2".into())?;
    let mut refuted = 0;
    let all = cases
        .iter()
        .map(|c| (&c.p, c.oracle))
        .chain(std::iter::once((&f2, f2_oracle)));
    for (p, oracle) in all {
        let got = solve(p, Strategy::Auto, &Limits::default(), &mut Silent).map_err(|e| e.to_string())?;
        match (&got, oracle) {
            (Outcome::NoSolution, Some(k)) => return Err(format!("NoSolution but the oracle has size {}", k)),
            (Outcome::NoSolution, None) => refuted += 1,
            (_, None) => return Err(format!("{:?} on an unsatisfiable problem", got)),
            _ => {}
        }
    }
    ensure(refuted >= 10, || format!("only {} refutations", refuted))?;
    Ok(format!("{} refuted, including f() = 2 over 0 | 1", refuted))
}

fn example2_grammar() -> GrammarSpec {
    let p = parse(&gen_max_n(2)).expect("reference input parses");
    p.grammar.unwrap()
}

fn example3() -> Check {
    let emb = embed(&example2_grammar(), &[("x1".into(), Sort::Int), ("x2".into(), Sort::Int)])
        .map_err(|e| e.to_string())?;
    let l = Lambda::new(
        emb.params.clone(),
        Term::add(Term::int_var("x1"), Term::mul(2, Term::int_var("x2"))),
    );
    let start = Instant::now();
    let out = solved(reconstruct_solution(&l, &emb, &Limits::default()).map_err(|e| e.to_string())?)?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(5), || format!("took {:?}", t))?;
    ensure(emb.conforms(&out.body, &emb.start).is_some(), || format!("{} does not conform", out.body))?;
    ensure(normalize(&out.body) == normalize(&l.body), || format!("{} is not normalize-equal", out.body))?;
    Ok(format!("{} in {:.2}s", out.body, t.as_secs_f64()))
}

const NAMES: [&str; 3] = ["x", "y", "z"];

fn random_query(rng: &mut ChaCha8Rng) -> GroundQuery {
    let nvars = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let mut parts = Vec::new();
        for name in NAMES.iter().take(nvars) {
            let c: i64 = rng.gen_range(-4..=4);
            if c != 0 {
                parts.push(Term::mul(c, Term::int_var(*name)));
            }
        }
        parts.push(Term::int(rng.gen_range(-12..=12i64)));
        let lhs = if parts.len() == 1 { parts.pop().unwrap() } else { Term::app(Op::Add, parts) };
        let op = [Op::Le, Op::Lt, Op::Ge, Op::Gt, Op::Eq][rng.gen_range(0..5)];
        let a = Term::app(op, vec![lhs, Term::int(rng.gen_range(-8..=8i64))]);
        atoms.push(if rng.gen_bool(0.2) { Term::not(a) } else { a });
    }
    let mut q = GroundQuery::new(NAMES.iter().take(nvars).map(|n| (n.to_string(), Sort::Int)).collect());
    while !atoms.is_empty() {
        let k = rng.gen_range(1..=atoms.len().min(3));
        let group: Vec<Term> = atoms.drain(..k).collect();
        q.assert(if group.len() > 1 && rng.gen_bool(0.5) { Term::or(group) } else { Term::and(group) });
    }
    q
}

fn brute_sat(q: &GroundQuery) -> bool {
    let n = q.env.len();
    for_box(n, -16, 16, |x| {
        let a: Assignment = q
            .env
            .iter()
            .zip(x)
            .map(|((name, _), v)| (name.clone(), Value::int(*v)))
            .collect();
        if q.assertions.iter().all(|t| holds(t, &a) == Ok(true)) {
            Err(String::new())
        } else {
            Ok(())
        }
    })
    .is_err()
}

fn theory_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac1e);
    let start = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..500 {
        let q = random_query(&mut rng);
        let got = check_sat(&q).map_err(|e| format!("query {}: {}", i, e))?;
        let oracle = brute_sat(&q);
        match &got {
            CheckResult::Sat(m) => {
                ensure(q.assertions.iter().all(|t| holds(t, m) == Ok(true)), || format!("bad model for query {}", i))?;
                sat += 1;
            }
            CheckResult::Unsat => {
                ensure(!oracle, || format!("query {} is Unsat but the oracle finds a model", i))?;
                unsat += 1;
            }
        }
        if oracle {
            ensure(got.is_sat(), || format!("query {} disagrees", i))?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(120), || format!("took {:?}", t))?;
    Ok(format!("500 queries ({} sat, {} unsat) in {:.2}s", sat, unsat, t.as_secs_f64()))
}

fn candidate_sequence() -> Check {
    let p = parse(&gen_max_n(2)).map_err(|e| e.to_string())?;
    let mut trace: Vec<TraceEvent> = Vec::new();
    solved(solve(&p, Strategy::Cegis, &Limits::default(), &mut trace).map_err(|e| e.to_string())?)?;
    let programs: Vec<_> = trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Candidate { program, .. } => Some(program.clone()),
            _ => None,
        })
        .collect();
    ensure(programs.len() >= 2, || format!("{} candidates", programs.len()))?;
    let distinct: BTreeSet<_> = programs.iter().collect();
    ensure(distinct.len() == programs.len(), || "repeated candidate".into())?;
    let sizes: Vec<usize> = programs.iter().map(term_size).collect();
    ensure(sizes.windows(2).all(|w| w[0] <= w[1]), || format!("sizes {:?}", sizes))?;
    ensure(sizes[0] == 0, || format!("first candidate has size {}", sizes[0]))?;
    Ok(format!("{} candidates, sizes {:?}", programs.len(), sizes))
}

fn corpus_round_trip() -> Check {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut n = 0;
    let mut entries: Vec<_> = std::fs::read_dir(&dir).map_err(|e| e.to_string())?.collect();
    entries.sort_by_key(|e| e.as_ref().map(|e| e.path()).ok());
    for e in entries {
        let path = e.map_err(|e| e.to_string())?.path();
        if path.extension().and_then(|x| x.to_str()) != Some("sl") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let p = parse(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
        let again = parse(&print_problem(&p)).map_err(|e| format!("{}: reprint: {}", path.display(), e))?;
        ensure(again == p, || format!("{} is not a fixpoint", path.display()))?;
        n += 1;
    }
    ensure(n >= 25, || format!("only {} corpus files", n))?;
    Ok(format!("{} files", n))
}

fn main() {
    let cases = catch_unwind(finite_cases).ok();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("max2 end-to-end", Box::new(max2_end_to_end)),
        ("max-of-n scaling", Box::new(max_n_scaling)),
        ("ite solutions from unsat instance sets", Box::new(ite_solutions)),
        (
            "enumerative minimality",
            Box::new(|| cases.as_deref().map_or(Err("case generation panicked".into()), minimality)),
        ),
        (
            "refutation soundness",
            Box::new(|| cases.as_deref().map_or(Err("case generation panicked".into()), refutation)),
        ),
        ("reconstruction of x1 + 2*x2", Box::new(example3)),
        ("theory oracle agreement", Box::new(theory_oracle)),
        ("candidate distinctness and size order", Box::new(candidate_sequence)),
        ("corpus round-trip", Box::new(corpus_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("criterion {} {}: PASS ({})", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {} {}: FAIL ({})", i + 1, name, why);
            }
        }
    }
    if failed > 0 {
        println!("{} of {} criteria failed", failed, criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
