//! Sorts, terms, lambdas and ground values.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::grammar::DatatypeValue;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Bool,
    Datatype(String),
}

impl Sort {
    pub fn is_datatype(&self) -> bool {
        matches!(self, Sort::Datatype(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("Int"),
            Sort::Bool => f.write_str("Bool"),
            Sort::Datatype(name) => f.write_str(name),
        }
    }
}

/// Builtin operators of linear integer arithmetic and Booleans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Add,
    Sub,
    Neg,
    /// Multiplication; one factor must be an integer literal.
    Mul,
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Not,
    And,
    Or,
    Implies,
    Ite,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub | Op::Neg => "-",
            Op::Mul => "*",
            Op::Le => "<=",
            Op::Lt => "<",
            Op::Ge => ">=",
            Op::Gt => ">",
            Op::Eq => "=",
            Op::Not => "not",
            Op::And => "and",
            Op::Or => "or",
            Op::Implies => "=>",
            Op::Ite => "ite",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, Op::Le | Op::Lt | Op::Ge | Op::Gt)
    }
}

/// A well-sorted expression. Children are owned; terms are immutable values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String, Sort),
    Int(BigInt),
    Bool(bool),
    Apply(Op, Vec<Term>),
    /// Datatype constructor application.
    Cons(String, Vec<Term>),
    /// `ev(program, inputs)` for a datatype; carries the datatype sort and
    /// the result sort (the theory sort the datatype embeds into).
    Eval(Sort, Sort, Box<Term>, Vec<Term>),
    /// Application of the function being synthesized (uninterpreted until a
    /// candidate is substituted for it).
    Call(String, Sort, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn int_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Int)
    }

    pub fn bool_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Bool)
    }

    pub fn int(value: impl Into<BigInt>) -> Term {
        Term::Int(value.into())
    }

    pub fn app(op: Op, args: Vec<Term>) -> Term {
        Term::Apply(op, args)
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Apply(Op::Add, alloc::vec![a, b])
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Apply(Op::Sub, alloc::vec![a, b])
    }

    pub fn neg(a: Term) -> Term {
        Term::Apply(Op::Neg, alloc::vec![a])
    }

    pub fn mul(c: impl Into<BigInt>, a: Term) -> Term {
        Term::Apply(Op::Mul, alloc::vec![Term::Int(c.into()), a])
    }

    pub fn le(a: Term, b: Term) -> Term {
        Term::Apply(Op::Le, alloc::vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Term {
        Term::Apply(Op::Lt, alloc::vec![a, b])
    }

    pub fn ge(a: Term, b: Term) -> Term {
        Term::Apply(Op::Ge, alloc::vec![a, b])
    }

    pub fn gt(a: Term, b: Term) -> Term {
        Term::Apply(Op::Gt, alloc::vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::Apply(Op::Eq, alloc::vec![a, b])
    }

    pub fn not(a: Term) -> Term {
        Term::Apply(Op::Not, alloc::vec![a])
    }

    pub fn and(args: Vec<Term>) -> Term {
        match args.len() {
            0 => Term::Bool(true),
            1 => args.into_iter().next().unwrap(),
            _ => Term::Apply(Op::And, args),
        }
    }

    pub fn or(args: Vec<Term>) -> Term {
        match args.len() {
            0 => Term::Bool(false),
            1 => args.into_iter().next().unwrap(),
            _ => Term::Apply(Op::Or, args),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::Apply(Op::Implies, alloc::vec![a, b])
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        Term::Apply(Op::Ite, alloc::vec![c, a, b])
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::Apply(_, args) | Term::Cons(_, args) | Term::Call(_, _, args) => args,
            _ => &[],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Eval(_, _, prog, inputs) => {
                1 + prog.size() + inputs.iter().map(Term::size).sum::<usize>()
            }
            _ => 1 + self.children().iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Int(_) | Term::Bool(_))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Term::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Term::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Sort of the term assuming it is well-sorted.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) | Term::Call(_, s, _) => s.clone(),
            Term::Int(_) => Sort::Int,
            Term::Bool(_) => Sort::Bool,
            Term::Apply(op, args) => match op {
                Op::Add | Op::Sub | Op::Neg | Op::Mul => Sort::Int,
                Op::Ite => args[1].sort(),
                _ => Sort::Bool,
            },
            // Constructor terms carry no sort annotation; callers that need
            // the datatype consult the embedding. The constructor name stands
            // in here.
            Term::Cons(name, _) => Sort::Datatype(name.clone()),
            Term::Eval(_, result, _, _) => result.clone(),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(n, _) => n == name,
            Term::Eval(_, _, prog, inputs) => {
                prog.contains_var(name) || inputs.iter().any(|t| t.contains_var(name))
            }
            _ => self.children().iter().any(|c| c.contains_var(name)),
        }
    }

    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            Term::Var(n, s) => {
                out.insert(n.clone(), s.clone());
            }
            Term::Eval(_, _, prog, inputs) => {
                prog.collect_vars(out);
                inputs.iter().for_each(|t| t.collect_vars(out));
            }
            _ => self.children().iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Pre-order visit of every subterm.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Eval(_, _, prog, inputs) => {
                prog.visit(f);
                inputs.iter().for_each(|t| t.visit(f));
            }
            _ => self.children().iter().for_each(|c| c.visit(f)),
        }
    }

    /// Bottom-up rewrite: children first, then `f` on the rebuilt node.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Term) -> Term) -> Term {
        let rebuilt = match self {
            Term::Apply(op, args) => {
                Term::Apply(*op, args.iter().map(|a| a.map_bottom_up(f)).collect())
            }
            Term::Cons(c, args) => {
                Term::Cons(c.clone(), args.iter().map(|a| a.map_bottom_up(f)).collect())
            }
            Term::Call(n, s, args) => Term::Call(
                n.clone(),
                s.clone(),
                args.iter().map(|a| a.map_bottom_up(f)).collect(),
            ),
            Term::Eval(s, r, prog, inputs) => Term::Eval(
                s.clone(),
                r.clone(),
                Box::new(prog.map_bottom_up(f)),
                inputs.iter().map(|a| a.map_bottom_up(f)).collect(),
            ),
            leaf => leaf.clone(),
        };
        f(rebuilt)
    }
}

impl From<i64> for Term {
    fn from(v: i64) -> Self {
        Term::Int(BigInt::from(v))
    }
}

impl From<bool> for Term {
    fn from(b: bool) -> Self {
        Term::Bool(b)
    }
}

fn write_int(f: &mut fmt::Formatter<'_>, v: &BigInt) -> fmt::Result {
    if v.is_negative() {
        write!(f, "(- {})", v.abs())
    } else {
        write!(f, "{}", v)
    }
}

/// S-expression surface syntax.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) => f.write_str(n),
            Term::Int(v) => write_int(f, v),
            Term::Bool(b) => write!(f, "{}", b),
            Term::Apply(op, args) => {
                write!(f, "({}", op.symbol())?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
            Term::Cons(c, args) | Term::Call(c, _, args) => {
                if args.is_empty() {
                    return f.write_str(c);
                }
                write!(f, "({}", c)?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
            Term::Eval(s, _, prog, inputs) => {
                write!(f, "(ev_{} {}", s, prog)?;
                for a in inputs {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `λ params. body`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lambda {
    pub params: Vec<(String, Sort)>,
    pub body: Term,
}

impl Lambda {
    pub fn new(params: Vec<(String, Sort)>, body: Term) -> Self {
        Lambda { params, body }
    }

    /// Beta-reduce an application of this lambda to `args`.
    pub fn apply(&self, args: &[Term]) -> Term {
        let bindings: BTreeMap<String, Term> = self
            .params
            .iter()
            .map(|(n, _)| n.clone())
            .zip(args.iter().cloned())
            .collect();
        substitute(&self.body, &bindings)
    }

    /// Evaluate on concrete inputs.
    pub fn eval(&self, inputs: &[Value]) -> Result<Value, EvalError> {
        let mut a = Assignment::new();
        for ((n, _), v) in self.params.iter().zip(inputs) {
            a.insert(n.clone(), v.clone());
        }
        eval_ground(&self.body, &a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Datatype(DatatypeValue),
}

impl Value {
    pub fn int(v: impl Into<BigInt>) -> Value {
        Value::Int(v.into())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(v) => Term::Int(v.clone()),
            Value::Bool(b) => Term::Bool(*b),
            Value::Datatype(d) => d.to_term(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{}", v),
            Value::Bool(b) => write!(f, "{}", b),
            Value::Datatype(d) => write!(f, "{}", d),
        }
    }
}

/// A model fragment: names to Int, Bool or datatype values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<String, Value>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restrict to the given names (missing names are skipped).
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Assignment {
        let mut out = Assignment::new();
        for n in names {
            if let Some(v) = self.0.get(n) {
                out.insert(n, v.clone());
            }
        }
        out
    }
}

impl FromIterator<(String, Value)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}={}", n, v)?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Well-sortedness
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SortError {
    #[error("sort mismatch at {path:?}: expected {expected}, found {found}")]
    SortMismatch {
        path: Vec<usize>,
        expected: Sort,
        found: Sort,
    },
    #[error("operator {op:?} at {path:?} expects {expected} argument(s), got {found}")]
    Arity {
        path: Vec<usize>,
        op: Op,
        expected: usize,
        found: usize,
    },
    #[error("multiplication at {path:?} has no literal factor")]
    Nonlinear { path: Vec<usize> },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
}

/// Signatures for constructors, evaluation operators and the synthesis target.
pub trait Signature {
    /// `(argument sorts, result sort)` of a constructor.
    fn constructor(&self, _name: &str) -> Option<(Vec<Sort>, Sort)> {
        None
    }
    /// Input sorts and result sort of `ev` on a datatype.
    fn evaluator(&self, _datatype: &Sort) -> Option<(Vec<Sort>, Sort)> {
        None
    }
    fn function(&self, _name: &str) -> Option<(Vec<Sort>, Sort)> {
        None
    }
}

/// Signature with no constructors and no functions.
pub struct NoSignature;

impl Signature for NoSignature {}

pub type SortEnv = BTreeMap<String, Sort>;

/// Sort of `t` under `env`, or the first ill-sorted subterm.
pub fn well_sorted(t: &Term, env: &SortEnv) -> Result<Sort, SortError> {
    well_sorted_in(t, env, &NoSignature)
}

pub fn well_sorted_in(t: &Term, env: &SortEnv, sig: &dyn Signature) -> Result<Sort, SortError> {
    let mut path = Vec::new();
    check(t, env, sig, &mut path)
}

fn expect(path: &[usize], expected: &Sort, found: Sort) -> Result<(), SortError> {
    if *expected == found {
        Ok(())
    } else {
        Err(SortError::SortMismatch {
            path: path.to_vec(),
            expected: expected.clone(),
            found,
        })
    }
}

fn check_args(
    args: &[Term],
    sorts: &[Sort],
    env: &SortEnv,
    sig: &dyn Signature,
    path: &mut Vec<usize>,
) -> Result<(), SortError> {
    for (i, (a, s)) in args.iter().zip(sorts).enumerate() {
        path.push(i);
        let found = check(a, env, sig, path)?;
        expect(path, s, found)?;
        path.pop();
    }
    Ok(())
}

fn arity(path: &[usize], op: Op, expected: usize, found: usize) -> SortError {
    SortError::Arity {
        path: path.to_vec(),
        op,
        expected,
        found,
    }
}

fn check(t: &Term, env: &SortEnv, sig: &dyn Signature, path: &mut Vec<usize>) -> Result<Sort, SortError> {
    match t {
        Term::Var(name, sort) => match env.get(name) {
            Some(s) => {
                expect(path, s, sort.clone())?;
                Ok(sort.clone())
            }
            None => Err(SortError::UnboundVariable(name.clone())),
        },
        Term::Int(_) => Ok(Sort::Int),
        Term::Bool(_) => Ok(Sort::Bool),
        Term::Apply(op, args) => {
            let n = args.len();
            let (arg_sort, result, ok) = match op {
                Op::Add => (Sort::Int, Sort::Int, n >= 2),
                Op::Sub => (Sort::Int, Sort::Int, n == 2),
                Op::Neg => (Sort::Int, Sort::Int, n == 1),
                Op::Mul => (Sort::Int, Sort::Int, n == 2),
                Op::Le | Op::Lt | Op::Ge | Op::Gt => (Sort::Int, Sort::Bool, n == 2),
                Op::Not => (Sort::Bool, Sort::Bool, n == 1),
                Op::And | Op::Or => (Sort::Bool, Sort::Bool, n >= 2),
                Op::Implies => (Sort::Bool, Sort::Bool, n == 2),
                Op::Eq => {
                    if n != 2 {
                        return Err(arity(path, *op, 2, n));
                    }
                    path.push(0);
                    let s0 = check(&args[0], env, sig, path)?;
                    path.pop();
                    path.push(1);
                    let s1 = check(&args[1], env, sig, path)?;
                    expect(path, &s0, s1)?;
                    path.pop();
                    return Ok(Sort::Bool);
                }
                Op::Ite => {
                    if n != 3 {
                        return Err(arity(path, *op, 3, n));
                    }
                    check_args(&args[..1], &[Sort::Bool], env, sig, path)?;
                    path.push(1);
                    let s1 = check(&args[1], env, sig, path)?;
                    path.pop();
                    path.push(2);
                    let s2 = check(&args[2], env, sig, path)?;
                    expect(path, &s1, s2)?;
                    path.pop();
                    return Ok(s1);
                }
            };
            if !ok {
                let expected = match op {
                    Op::Neg | Op::Not => 1,
                    _ => 2,
                };
                return Err(arity(path, *op, expected, n));
            }
            let sorts: Vec<Sort> = core::iter::repeat(arg_sort).take(n).collect();
            check_args(args, &sorts, env, sig, path)?;
            if *op == Op::Mul && !args.iter().any(Term::is_literal) {
                return Err(SortError::Nonlinear { path: path.clone() });
            }
            Ok(result)
        }
        Term::Cons(name, args) => {
            let (sorts, result) = sig
                .constructor(name)
                .ok_or_else(|| SortError::UnknownSymbol(name.clone()))?;
            if sorts.len() != args.len() {
                return Err(SortError::UnknownSymbol(name.clone()));
            }
            check_args(args, &sorts, env, sig, path)?;
            Ok(result)
        }
        Term::Call(name, sort, args) => {
            let (sorts, result) = sig
                .function(name)
                .ok_or_else(|| SortError::UnknownSymbol(name.clone()))?;
            if sorts.len() != args.len() {
                return Err(SortError::UnknownSymbol(name.clone()));
            }
            expect(path, &result, sort.clone())?;
            check_args(args, &sorts, env, sig, path)?;
            Ok(result)
        }
        Term::Eval(dt, declared, prog, inputs) => {
            let (sorts, result) = sig
                .evaluator(dt)
                .ok_or_else(|| SortError::UnknownSymbol(alloc::format!("ev_{}", dt)))?;
            path.push(0);
            let ps = check(prog, env, sig, path)?;
            expect(path, dt, ps)?;
            path.pop();
            if sorts.len() != inputs.len() {
                return Err(SortError::UnknownSymbol(alloc::format!("ev_{}", dt)));
            }
            for (i, (a, s)) in inputs.iter().zip(&sorts).enumerate() {
                path.push(i + 1);
                let found = check(a, env, sig, path)?;
                expect(path, s, found)?;
                path.pop();
            }
            expect(path, &result, declared.clone())?;
            Ok(result)
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// Simultaneous substitution of variables by terms. Terms carry no binders,
/// so substitution is capture-free by construction.
pub fn substitute(t: &Term, bindings: &BTreeMap<String, Term>) -> Term {
    if bindings.is_empty() {
        return t.clone();
    }
    subst(t, bindings)
}

fn subst(t: &Term, b: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(n, _) => b.get(n).cloned().unwrap_or_else(|| t.clone()),
        Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Apply(op, args) => Term::Apply(*op, args.iter().map(|a| subst(a, b)).collect()),
        Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| subst(a, b)).collect()),
        Term::Call(n, s, args) => Term::Call(
            n.clone(),
            s.clone(),
            args.iter().map(|a| subst(a, b)).collect(),
        ),
        Term::Eval(s, r, prog, inputs) => Term::Eval(
            s.clone(),
            r.clone(),
            Box::new(subst(prog, b)),
            inputs.iter().map(|a| subst(a, b)).collect(),
        ),
    }
}

/// Substitution that checks each binding's sort against the variable it
/// replaces.
pub fn substitute_checked(
    t: &Term,
    bindings: &BTreeMap<String, Term>,
    env: &SortEnv,
) -> Result<Term, SortError> {
    let vars = t.free_vars();
    for (name, value) in bindings {
        if let Some(sort) = vars.get(name) {
            let found = well_sorted(value, env)?;
            expect(&[], sort, found)?;
        }
    }
    Ok(substitute(t, bindings))
}

/// Replace every application of `func` by `lambda` applied to its arguments.
pub fn replace_calls(t: &Term, func: &str, lambda: &Lambda) -> Term {
    t.map_bottom_up(&mut |node| match node {
        Term::Call(ref n, _, ref args) if n == func => lambda.apply(args),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// Ground evaluation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unassigned variable {0}")]
    UnassignedVariable(String),
    #[error("cannot evaluate {0} here")]
    Unsupported(&'static str),
    #[error("ill-sorted term during evaluation")]
    IllSorted,
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
}

/// Value of an Eval-free term under `a`.
pub fn eval_ground(t: &Term, a: &Assignment) -> Result<Value, EvalError> {
    eval_with(t, a, &mut |_, _, _| Err(EvalError::Unsupported("evaluation operator")))
}

pub(crate) type EvalHook<'h> = dyn FnMut(&Sort, &Value, &[Value]) -> Result<Value, EvalError> + 'h;

pub(crate) fn eval_with(t: &Term, a: &Assignment, hook: &mut EvalHook<'_>) -> Result<Value, EvalError> {
    match t {
        Term::Var(n, _) => a
            .get(n)
            .cloned()
            .ok_or_else(|| EvalError::UnassignedVariable(n.clone())),
        Term::Int(v) => Ok(Value::Int(v.clone())),
        Term::Bool(b) => Ok(Value::Bool(*b)),
        Term::Apply(op, args) => eval_apply(*op, args, a, hook),
        Term::Cons(_, _) => Err(EvalError::Unsupported("constructor term")),
        Term::Call(_, _, _) => Err(EvalError::Unsupported("uninterpreted application")),
        Term::Eval(dt, _, prog, inputs) => {
            let p = match prog.as_ref() {
                Term::Var(n, _) => a
                    .get(n)
                    .cloned()
                    .ok_or_else(|| EvalError::UnassignedVariable(n.clone()))?,
                _ => return Err(EvalError::Unsupported("non-variable program")),
            };
            let vals = inputs
                .iter()
                .map(|i| eval_with(i, a, hook))
                .collect::<Result<Vec<_>, _>>()?;
            hook(dt, &p, &vals)
        }
    }
}

fn int_of(v: Value) -> Result<BigInt, EvalError> {
    match v {
        Value::Int(i) => Ok(i),
        _ => Err(EvalError::IllSorted),
    }
}

fn bool_of(v: Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        _ => Err(EvalError::IllSorted),
    }
}

fn eval_apply(op: Op, args: &[Term], a: &Assignment, hook: &mut EvalHook<'_>) -> Result<Value, EvalError> {
    let int = |i: usize, hook: &mut EvalHook<'_>| eval_with(&args[i], a, hook).and_then(int_of);
    match op {
        Op::Add => {
            let mut acc = BigInt::zero();
            for i in 0..args.len() {
                acc += int(i, hook)?;
            }
            Ok(Value::Int(acc))
        }
        Op::Sub => Ok(Value::Int(int(0, hook)? - int(1, hook)?)),
        Op::Neg => Ok(Value::Int(-int(0, hook)?)),
        Op::Mul => Ok(Value::Int(int(0, hook)? * int(1, hook)?)),
        Op::Le => Ok(Value::Bool(int(0, hook)? <= int(1, hook)?)),
        Op::Lt => Ok(Value::Bool(int(0, hook)? < int(1, hook)?)),
        Op::Ge => Ok(Value::Bool(int(0, hook)? >= int(1, hook)?)),
        Op::Gt => Ok(Value::Bool(int(0, hook)? > int(1, hook)?)),
        Op::Eq => {
            let l = eval_with(&args[0], a, hook)?;
            let r = eval_with(&args[1], a, hook)?;
            Ok(Value::Bool(l == r))
        }
        Op::Not => Ok(Value::Bool(!bool_of(eval_with(&args[0], a, hook)?)?)),
        Op::And => {
            for t in args {
                if !bool_of(eval_with(t, a, hook)?)? {
                    return Ok(Value::Bool(false));
                }
            }
            Ok(Value::Bool(true))
        }
        Op::Or => {
            for t in args {
                if bool_of(eval_with(t, a, hook)?)? {
                    return Ok(Value::Bool(true));
                }
            }
            Ok(Value::Bool(false))
        }
        Op::Implies => {
            if bool_of(eval_with(&args[0], a, hook)?)? {
                Ok(Value::Bool(bool_of(eval_with(&args[1], a, hook)?)?))
            } else {
                Ok(Value::Bool(true))
            }
        }
        Op::Ite => {
            if bool_of(eval_with(&args[0], a, hook)?)? {
                eval_with(&args[1], a, hook)
            } else {
                eval_with(&args[2], a, hook)
            }
        }
    }
}

/// Evaluate a Bool term, treating a non-Bool result as an error.
pub fn holds(t: &Term, a: &Assignment) -> Result<bool, EvalError> {
    bool_of(eval_ground(t, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn env(names: &[(&str, Sort)]) -> SortEnv {
        names.iter().map(|(n, s)| (String::from(*n), s.clone())).collect()
    }

    #[test]
    fn sorts_of_simple_terms() {
        let e = env(&[("x1", Sort::Int), ("x2", Sort::Int)]);
        let x1 = Term::int_var("x1");
        let x2 = Term::int_var("x2");
        assert_eq!(well_sorted(&Term::add(x1.clone(), Term::int(1)), &e), Ok(Sort::Int));
        let max = Term::ite(Term::le(x1.clone(), x2.clone()), x2.clone(), x1.clone());
        assert_eq!(well_sorted(&max, &e), Ok(Sort::Int));
        let bad = Term::and(vec![x1, Term::Bool(true)]);
        assert!(matches!(
            well_sorted(&bad, &e),
            Err(SortError::SortMismatch { expected: Sort::Bool, found: Sort::Int, .. })
        ));
    }

    #[test]
    fn ite_branches_must_agree() {
        let e = env(&[("x", Sort::Int), ("b", Sort::Bool)]);
        let t = Term::ite(Term::bool_var("b"), Term::int_var("x"), Term::Bool(true));
        assert!(matches!(
            well_sorted(&t, &e),
            Err(SortError::SortMismatch { ref path, .. }) if path == &vec![2]
        ));
    }

    #[test]
    fn multiplication_needs_a_literal() {
        let e = env(&[("x", Sort::Int)]);
        let t = Term::app(Op::Mul, vec![Term::int_var("x"), Term::int_var("x")]);
        assert!(matches!(well_sorted(&t, &e), Err(SortError::Nonlinear { .. })));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let t = Term::add(Term::int_var("x"), Term::int_var("y"));
        let mut b = BTreeMap::new();
        b.insert(String::from("x"), Term::int(1));
        b.insert(String::from("y"), Term::int_var("x"));
        assert_eq!(substitute(&t, &b), Term::add(Term::int(1), Term::int_var("x")));
        assert_eq!(substitute(&t, &BTreeMap::new()), t);
    }

    #[test]
    fn checked_substitution_rejects_sort_errors() {
        let e = env(&[("x", Sort::Int), ("b", Sort::Bool)]);
        let t = Term::add(Term::int_var("x"), Term::int(1));
        let mut b = BTreeMap::new();
        b.insert(String::from("x"), Term::bool_var("b"));
        assert!(substitute_checked(&t, &b, &e).is_err());
    }

    #[test]
    fn ground_evaluation() {
        let t = Term::ite(Term::ge(Term::int(0), Term::int(1)), Term::int(0), Term::int(1));
        assert_eq!(eval_ground(&t, &Assignment::new()), Ok(Value::int(1)));
        let t = Term::add(
            Term::int_var("x1"),
            Term::add(Term::int_var("x2"), Term::int_var("x2")),
        );
        let mut a = Assignment::new();
        a.insert("x1", Value::int(1));
        a.insert("x2", Value::int(2));
        assert_eq!(eval_ground(&t, &a), Ok(Value::int(5)));
        assert_eq!(
            eval_ground(&Term::int_var("x1"), &Assignment::new()),
            Err(EvalError::UnassignedVariable(String::from("x1")))
        );
    }

    #[test]
    fn display_uses_sygus_syntax() {
        let t = Term::ite(
            Term::ge(Term::int_var("x2"), Term::int_var("x1")),
            Term::int_var("x2"),
            Term::int(-3),
        );
        assert_eq!(alloc::format!("{}", t), "(ite (>= x2 x1) x2 (- 3))");
    }
}
