//! Grammars as datatype families: constructors, analogues, an interpreter
//! for the evaluation operator, and size-ordered enumeration.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, Sign};

use crate::problem::{GrammarSpec, Production};
use crate::term::{eval_with, Assignment, EvalError, Op, Signature, Sort, Term, Value};

/// What a constructor means in the theory.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Analogue {
    Op(Op),
    /// Index into the embedding's parameters.
    Param(usize),
    Int(BigInt),
    Bool(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub args: Vec<Sort>,
    pub analogue: Analogue,
}

impl Constructor {
    pub fn is_nullary(&self) -> bool {
        self.args.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatatypeDecl {
    pub sort: Sort,
    /// Sort of the analogues of this datatype's values.
    pub theory_sort: Sort,
    pub constructors: Vec<Constructor>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("unsupported production {0}")]
    UnsupportedProduction(String),
    #[error("unknown nonterminal {0}")]
    UnknownNonterminal(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
    #[error("constructor {0} applied to arguments of the wrong sort or number")]
    BadArguments(String),
}

/// A datatype family standing for a grammar.
#[derive(Clone, Debug)]
pub struct GrammarEmbedding {
    pub datatypes: Vec<DatatypeDecl>,
    pub start: Sort,
    pub params: Vec<(String, Sort)>,
    names: Vec<Vec<Arc<str>>>,
    by_name: BTreeMap<String, (usize, usize)>,
    finite_max: Vec<Option<usize>>,
}

fn op_ctor_name(op: Op) -> &'static str {
    match op {
        Op::Add => "plus",
        Op::Sub => "minus",
        Op::Neg => "neg",
        Op::Mul => "times",
        Op::Le => "leq",
        Op::Lt => "lt",
        Op::Ge => "geq",
        Op::Gt => "gt",
        Op::Eq => "eq",
        Op::Not => "not",
        Op::And => "and",
        Op::Or => "or",
        Op::Implies => "implies",
        Op::Ite => "if",
    }
}

fn literal_ctor_name(v: &BigInt) -> String {
    match v.sign() {
        Sign::NoSign => String::from("zero"),
        _ if *v == BigInt::from(1) => String::from("one"),
        Sign::Minus => alloc::format!("int_neg{}", v.magnitude()),
        _ => alloc::format!("int_{}", v),
    }
}

/// Check an operator production's argument sorts and result sort.
fn production_sorts_ok(op: Op, args: &[Sort], result: &Sort) -> bool {
    let all = |s: &Sort| args.iter().all(|a| a == s);
    let n = args.len();
    match op {
        Op::Add => n >= 2 && all(&Sort::Int) && *result == Sort::Int,
        Op::Sub => n == 2 && all(&Sort::Int) && *result == Sort::Int,
        Op::Neg => n == 1 && all(&Sort::Int) && *result == Sort::Int,
        Op::Mul => false,
        Op::Le | Op::Lt | Op::Ge | Op::Gt => n == 2 && all(&Sort::Int) && *result == Sort::Bool,
        Op::Eq => n == 2 && args[0] == args[1] && *result == Sort::Bool,
        Op::Not => n == 1 && all(&Sort::Bool) && *result == Sort::Bool,
        Op::And | Op::Or => n >= 2 && all(&Sort::Bool) && *result == Sort::Bool,
        Op::Implies => n == 2 && all(&Sort::Bool) && *result == Sort::Bool,
        Op::Ite => n == 3 && args[0] == Sort::Bool && args[1] == *result && args[2] == *result,
    }
}

/// Build the datatype family for `g`: one datatype per nonterminal, one
/// constructor per production.
pub fn embed(g: &GrammarSpec, params: &[(String, Sort)]) -> Result<GrammarEmbedding, GrammarError> {
    let theory: BTreeMap<&str, &Sort> = g.nonterminals.iter().map(|n| (n.name.as_str(), &n.sort)).collect();
    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let mut datatypes = Vec::new();
    for nt in &g.nonterminals {
        let mut ctors = Vec::new();
        for p in &nt.productions {
            let (base, args, analogue, theory_args): (String, Vec<Sort>, Analogue, Vec<Sort>) = match p {
                Production::Param(name) => {
                    let i = params
                        .iter()
                        .position(|(n, _)| n == name)
                        .ok_or_else(|| GrammarError::UnknownParameter(name.clone()))?;
                    if params[i].1 != nt.sort {
                        return Err(GrammarError::UnsupportedProduction(name.clone()));
                    }
                    (name.clone(), Vec::new(), Analogue::Param(i), Vec::new())
                }
                Production::Int(v) => {
                    if nt.sort != Sort::Int {
                        return Err(GrammarError::UnsupportedProduction(alloc::format!("{}", v)));
                    }
                    (literal_ctor_name(v), Vec::new(), Analogue::Int(v.clone()), Vec::new())
                }
                Production::Bool(b) => {
                    if nt.sort != Sort::Bool {
                        return Err(GrammarError::UnsupportedProduction(alloc::format!("{}", b)));
                    }
                    (alloc::format!("{}", b), Vec::new(), Analogue::Bool(*b), Vec::new())
                }
                Production::Op(op, args) => {
                    let mut sorts = Vec::new();
                    let mut tsorts = Vec::new();
                    for a in args {
                        let ts = theory.get(a.as_str()).ok_or_else(|| GrammarError::UnknownNonterminal(a.clone()))?;
                        sorts.push(Sort::Datatype(a.clone()));
                        tsorts.push((*ts).clone());
                    }
                    (String::from(op_ctor_name(*op)), sorts, Analogue::Op(*op), tsorts)
                }
                Production::Unsupported(text) => return Err(GrammarError::UnsupportedProduction(text.clone())),
            };
            if let Analogue::Op(op) = analogue {
                if !production_sorts_ok(op, &theory_args, &nt.sort) {
                    return Err(GrammarError::UnsupportedProduction(alloc::format!(
                        "({} {})",
                        op.symbol(),
                        args.iter().map(|s| alloc::format!("{}", s)).collect::<Vec<_>>().join(" ")
                    )));
                }
            }
            let name = unique_name(&mut used, base, &nt.name);
            ctors.push(Constructor { name, args, analogue });
        }
        datatypes.push(DatatypeDecl {
            sort: Sort::Datatype(nt.name.clone()),
            theory_sort: nt.sort.clone(),
            constructors: ctors,
        });
    }
    Ok(GrammarEmbedding::from_parts(
        datatypes,
        Sort::Datatype(g.start().name.clone()),
        params.to_vec(),
    ))
}

fn unique_name(used: &mut BTreeMap<String, usize>, base: String, nt: &str) -> String {
    let mut name = base.clone();
    if used.contains_key(&name) {
        name = alloc::format!("{}_{}", base, nt);
    }
    let mut k = 2;
    while used.contains_key(&name) {
        name = alloc::format!("{}_{}{}", base, nt, k);
        k += 1;
    }
    used.insert(name.clone(), 0);
    name
}

impl GrammarEmbedding {
    pub fn from_parts(datatypes: Vec<DatatypeDecl>, start: Sort, params: Vec<(String, Sort)>) -> Self {
        let names = datatypes
            .iter()
            .map(|d| d.constructors.iter().map(|c| Arc::from(c.name.as_str())).collect())
            .collect();
        let mut by_name = BTreeMap::new();
        for (i, d) in datatypes.iter().enumerate() {
            for (j, c) in d.constructors.iter().enumerate() {
                by_name.insert(c.name.clone(), (i, j));
            }
        }
        let mut e = GrammarEmbedding {
            datatypes,
            start,
            params,
            names,
            by_name,
            finite_max: Vec::new(),
        };
        e.finite_max = e.compute_finiteness();
        e
    }

    pub fn index_of(&self, sort: &Sort) -> Option<usize> {
        self.datatypes.iter().position(|d| d.sort == *sort)
    }

    pub fn start_index(&self) -> usize {
        self.index_of(&self.start).expect("start datatype")
    }

    pub fn decl(&self, sort: &Sort) -> Option<&DatatypeDecl> {
        self.index_of(sort).map(|i| &self.datatypes[i])
    }

    pub fn constructor(&self, name: &str) -> Option<(usize, usize)> {
        self.by_name.get(name).copied()
    }

    /// Constructors of datatype `dt` whose analogue is `a`.
    pub fn constructors_with<'a>(&'a self, dt: usize, a: &'a Analogue) -> impl Iterator<Item = (usize, &'a Constructor)> + 'a {
        self.datatypes[dt]
            .constructors
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.analogue == *a)
    }

    /// Whether the start datatype can build ite terms.
    pub fn start_has_ite(&self) -> bool {
        self.datatypes[self.start_index()]
            .constructors
            .iter()
            .any(|c| c.analogue == Analogue::Op(Op::Ite))
    }

    /// Largest term size of datatype `dt` when it has finitely many values.
    pub fn finite_max_size(&self, dt: usize) -> Option<usize> {
        self.finite_max[dt]
    }

    fn compute_finiteness(&self) -> Vec<Option<usize>> {
        let n = self.datatypes.len();
        let idx = |s: &Sort| self.index_of(s).expect("argument datatype");
        // Inhabited datatypes by fixpoint.
        let mut inhabited = alloc::vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (i, d) in self.datatypes.iter().enumerate() {
                if !inhabited[i] && d.constructors.iter().any(|c| c.args.iter().all(|a| inhabited[idx(a)])) {
                    inhabited[i] = true;
                    changed = true;
                }
            }
        }
        let productive = |c: &Constructor| c.args.iter().all(|a| inhabited[idx(a)]);
        // Longest path by memoized DFS; None on reaching a cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            Active,
            Done(Option<usize>),
        }
        fn visit(
            e: &GrammarEmbedding,
            i: usize,
            marks: &mut Vec<Mark>,
            inhabited: &[bool],
            productive: &dyn Fn(&Constructor) -> bool,
        ) -> Option<usize> {
            match marks[i] {
                Mark::Done(r) => return r,
                Mark::Active => return None,
                Mark::Fresh => {}
            }
            marks[i] = Mark::Active;
            let mut best = Some(0usize);
            if !inhabited[i] {
                marks[i] = Mark::Done(Some(0));
                return Some(0);
            }
            for c in e.datatypes[i].constructors.iter().filter(|c| productive(c)) {
                if c.args.is_empty() {
                    continue;
                }
                let mut total = Some(1usize);
                for a in &c.args {
                    let j = e.index_of(a).unwrap();
                    total = match (total, visit(e, j, marks, inhabited, productive)) {
                        (Some(t), Some(m)) => Some(t + m),
                        _ => None,
                    };
                }
                best = match (best, total) {
                    (Some(b), Some(t)) => Some(b.max(t)),
                    _ => None,
                };
            }
            marks[i] = Mark::Done(best);
            best
        }
        let mut marks = alloc::vec![Mark::Fresh; n];
        (0..n).map(|i| visit(self, i, &mut marks, &inhabited, &productive)).collect()
    }

    /// Build a value from a constructor name and children, checking sorts.
    pub fn value(&self, name: &str, args: Vec<DatatypeValue>) -> Result<DatatypeValue, GrammarError> {
        let (dt, ci) = self
            .constructor(name)
            .ok_or_else(|| GrammarError::UnknownConstructor(String::from(name)))?;
        let c = &self.datatypes[dt].constructors[ci];
        if c.args.len() != args.len()
            || c.args.iter().zip(&args).any(|(s, a)| self.datatypes[a.datatype()].sort != *s)
        {
            return Err(GrammarError::BadArguments(String::from(name)));
        }
        Ok(self.make(dt, ci, args))
    }

    fn make(&self, dt: usize, ci: usize, args: Vec<DatatypeValue>) -> DatatypeValue {
        let size = if args.is_empty() {
            0
        } else {
            1 + args.iter().map(|a| a.0.size).sum::<usize>()
        };
        DatatypeValue(Arc::new(Node {
            dt,
            ctor: ci,
            name: self.names[dt][ci].clone(),
            args,
            size,
        }))
    }

    /// Value denoted by a constructor term.
    pub fn value_of_term(&self, t: &Term) -> Result<DatatypeValue, GrammarError> {
        match t {
            Term::Cons(name, args) => {
                let vals = args.iter().map(|a| self.value_of_term(a)).collect::<Result<Vec<_>, _>>()?;
                self.value(name, vals)
            }
            other => Err(GrammarError::UnknownConstructor(alloc::format!("{}", other))),
        }
    }

    /// Theory term obtained by replacing each constructor with its analogue.
    pub fn analogue(&self, d: &DatatypeValue) -> Term {
        let c = &self.datatypes[d.0.dt].constructors[d.0.ctor];
        match &c.analogue {
            Analogue::Param(i) => Term::Var(self.params[*i].0.clone(), self.params[*i].1.clone()),
            Analogue::Int(v) => Term::Int(v.clone()),
            Analogue::Bool(b) => Term::Bool(*b),
            Analogue::Op(op) => Term::Apply(*op, d.0.args.iter().map(|a| self.analogue(a)).collect()),
        }
    }

    /// Interpreter for the evaluation operator.
    pub fn eval_program(&self, d: &DatatypeValue, inputs: &[Value]) -> Result<Value, EvalError> {
        let node = &d.0;
        let c = &self.datatypes[node.dt].constructors[node.ctor];
        let arg = |i: usize| self.eval_program(&node.args[i], inputs);
        let int = |i: usize| match arg(i)? {
            Value::Int(v) => Ok(v),
            _ => Err(EvalError::IllSorted),
        };
        let boolean = |i: usize| match arg(i)? {
            Value::Bool(b) => Ok(b),
            _ => Err(EvalError::IllSorted),
        };
        Ok(match &c.analogue {
            Analogue::Param(i) => inputs.get(*i).cloned().ok_or(EvalError::IllSorted)?,
            Analogue::Int(v) => Value::Int(v.clone()),
            Analogue::Bool(b) => Value::Bool(*b),
            Analogue::Op(op) => match op {
                Op::Add => {
                    let mut acc = int(0)?;
                    for i in 1..node.args.len() {
                        acc += int(i)?;
                    }
                    Value::Int(acc)
                }
                Op::Sub => Value::Int(int(0)? - int(1)?),
                Op::Neg => Value::Int(-int(0)?),
                Op::Mul => Value::Int(int(0)? * int(1)?),
                Op::Le => Value::Bool(int(0)? <= int(1)?),
                Op::Lt => Value::Bool(int(0)? < int(1)?),
                Op::Ge => Value::Bool(int(0)? >= int(1)?),
                Op::Gt => Value::Bool(int(0)? > int(1)?),
                Op::Eq => Value::Bool(arg(0)? == arg(1)?),
                Op::Not => Value::Bool(!boolean(0)?),
                Op::And => Value::Bool((0..node.args.len()).try_fold(true, |acc, i| Ok::<_, EvalError>(acc && boolean(i)?))?),
                Op::Or => Value::Bool((0..node.args.len()).try_fold(false, |acc, i| Ok::<_, EvalError>(acc || boolean(i)?))?),
                Op::Implies => Value::Bool(!boolean(0)? || boolean(1)?),
                Op::Ite => {
                    if boolean(0)? {
                        arg(1)?
                    } else {
                        arg(2)?
                    }
                }
            },
        })
    }

    /// Evaluate a term whose Eval nodes apply datatype-valued variables.
    pub fn eval_term(&self, t: &Term, a: &Assignment) -> Result<Value, EvalError> {
        eval_with(t, a, &mut |_, prog, inputs| match prog {
            Value::Datatype(d) => self.eval_program(d, inputs),
            _ => Err(EvalError::IllSorted),
        })
    }

    /// Preimage of `t` under `analogue` in datatype `sort`, if any.
    pub fn conforms(&self, t: &Term, sort: &Sort) -> Option<DatatypeValue> {
        let dt = self.index_of(sort)?;
        let mut memo = BTreeMap::new();
        self.parse(t, dt, &mut memo, 0)
    }

    fn parse(
        &self,
        t: &Term,
        dt: usize,
        memo: &mut BTreeMap<(Term, usize), Option<DatatypeValue>>,
        depth: usize,
    ) -> Option<DatatypeValue> {
        if depth > 4 * t.size() + 64 {
            return None;
        }
        let key = (t.clone(), dt);
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        memo.insert(key.clone(), None);
        let mut found = None;
        for (ci, c) in self.datatypes[dt].constructors.iter().enumerate() {
            let ok = match (&c.analogue, t) {
                (Analogue::Param(i), Term::Var(n, _)) => *n == self.params[*i].0,
                (Analogue::Int(v), Term::Int(w)) => v == w,
                (Analogue::Bool(b), Term::Bool(w)) => b == w,
                (Analogue::Op(op), Term::Apply(top, args)) => op == top && args.len() == c.args.len(),
                _ => false,
            };
            if !ok {
                continue;
            }
            let mut kids = Vec::new();
            for (a, s) in t.children().iter().zip(&c.args) {
                let j = self.index_of(s).unwrap();
                match self.parse(a, j, memo, depth + 1) {
                    Some(v) => kids.push(v),
                    None => break,
                }
            }
            if kids.len() == c.args.len() {
                found = Some(self.make(dt, ci, kids));
                break;
            }
        }
        memo.insert(key, found.clone());
        found
    }

    /// Size-ordered stream of the values of `sort`.
    pub fn enumerate(&self, sort: &Sort) -> ValueStream<'_> {
        let dt = self.index_of(sort).expect("datatype in family");
        ValueStream {
            enumerator: Enumerator::new(self),
            dt,
        }
    }
}

impl Signature for GrammarEmbedding {
    fn constructor(&self, name: &str) -> Option<(Vec<Sort>, Sort)> {
        let (dt, ci) = GrammarEmbedding::constructor(self, name)?;
        Some((self.datatypes[dt].constructors[ci].args.clone(), self.datatypes[dt].sort.clone()))
    }

    fn evaluator(&self, datatype: &Sort) -> Option<(Vec<Sort>, Sort)> {
        let d = self.decl(datatype)?;
        Some((self.params.iter().map(|(_, s)| s.clone()).collect(), d.theory_sort.clone()))
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node {
    dt: usize,
    ctor: usize,
    name: Arc<str>,
    args: Vec<DatatypeValue>,
    size: usize,
}

/// A constructor term over one family. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DatatypeValue(Arc<Node>);

impl DatatypeValue {
    pub fn constructor(&self) -> &str {
        &self.0.name
    }

    pub fn args(&self) -> &[DatatypeValue] {
        &self.0.args
    }

    /// Index of the value's datatype in its family.
    pub fn datatype(&self) -> usize {
        self.0.dt
    }

    pub fn constructor_index(&self) -> usize {
        self.0.ctor
    }

    pub fn to_term(&self) -> Term {
        Term::Cons(String::from(&*self.0.name), self.0.args.iter().map(DatatypeValue::to_term).collect())
    }
}

/// Number of non-nullary constructor applications.
pub fn term_size(d: &DatatypeValue) -> usize {
    d.0.size
}

impl fmt::Display for DatatypeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.args.is_empty() {
            return f.write_str(&self.0.name);
        }
        write!(f, "({}", self.0.name)?;
        for a in &self.0.args {
            write!(f, " {}", a)?;
        }
        f.write_str(")")
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Why a stream stopped producing values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamEnd {
    /// Every value of the datatype has been produced.
    Exhausted,
    /// The next value would exceed the size cap.
    Capped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Next {
    Value(DatatypeValue),
    End(StreamEnd),
}

type Stratum = Arc<Vec<DatatypeValue>>;

/// Position inside one (datatype, size) stratum.
struct Cursor {
    dt: usize,
    size: usize,
    ctor: usize,
    parts: Option<Vec<usize>>,
    lists: Vec<Stratum>,
    idx: Vec<usize>,
    active: bool,
}

impl Cursor {
    fn new(dt: usize, size: usize) -> Self {
        Cursor {
            dt,
            size,
            ctor: 0,
            parts: None,
            lists: Vec::new(),
            idx: Vec::new(),
            active: false,
        }
    }
}

/// Next composition of `parts` (same length and sum) in lexicographic order.
fn next_composition(parts: &mut [usize]) -> bool {
    let k = parts.len();
    if k < 2 {
        return false;
    }
    let mut tail = parts[k - 1];
    for i in (0..k - 1).rev() {
        if tail > 0 {
            parts[i] += 1;
            for p in parts.iter_mut().take(k - 1).skip(i + 1) {
                *p = 0;
            }
            parts[k - 1] = tail - 1;
            return true;
        }
        tail += parts[i];
    }
    false
}

/// Fair enumerator over all datatypes of a family. Strata below the current
/// size are materialized and shared; the current stratum is produced lazily.
pub struct Enumerator<'e> {
    emb: &'e GrammarEmbedding,
    strata: Vec<Vec<Option<Stratum>>>,
    counts: Vec<Vec<u128>>,
    cursors: Vec<Option<Cursor>>,
    pending: Vec<Vec<DatatypeValue>>,
    cap: Option<usize>,
}

impl<'e> Enumerator<'e> {
    pub fn new(emb: &'e GrammarEmbedding) -> Self {
        let n = emb.datatypes.len();
        Enumerator {
            emb,
            strata: (0..n).map(|_| Vec::new()).collect(),
            counts: (0..n).map(|_| Vec::new()).collect(),
            cursors: (0..n).map(|_| None).collect(),
            pending: (0..n).map(|_| Vec::new()).collect(),
            cap: None,
        }
    }

    /// Stop every stream before values larger than `cap`.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn embedding(&self) -> &'e GrammarEmbedding {
        self.emb
    }

    /// Number of values of datatype `dt` with exactly `size` (saturating).
    pub fn count(&mut self, dt: usize, size: usize) -> u128 {
        while self.counts[dt].len() <= size {
            let s = self.counts[dt].len();
            let c = self.count_at(dt, s);
            self.counts[dt].push(c);
        }
        self.counts[dt][size]
    }

    fn count_at(&mut self, dt: usize, size: usize) -> u128 {
        let emb = self.emb;
        let mut total: u128 = 0;
        for c in &emb.datatypes[dt].constructors {
            if c.args.is_empty() {
                if size == 0 {
                    total = total.saturating_add(1);
                }
                continue;
            }
            if size == 0 {
                continue;
            }
            let arg_idx: Vec<usize> = c.args.iter().map(|a| emb.index_of(a).unwrap()).collect();
            let mut parts = alloc::vec![0usize; arg_idx.len()];
            *parts.last_mut().unwrap() = size - 1;
            loop {
                let mut prod: u128 = 1;
                for (j, &p) in arg_idx.iter().zip(&parts) {
                    let c = self.count(*j, p);
                    prod = prod.saturating_mul(c);
                    if prod == 0 {
                        break;
                    }
                }
                total = total.saturating_add(prod);
                if !next_composition(&mut parts) {
                    break;
                }
            }
        }
        total
    }

    /// All values of `dt` with exactly `size`.
    fn stratum(&mut self, dt: usize, size: usize) -> Stratum {
        if let Some(Some(s)) = self.strata[dt].get(size) {
            return s.clone();
        }
        let values = if self.count(dt, size) == 0 {
            Vec::new()
        } else {
            let mut cur = Cursor::new(dt, size);
            let mut out = Vec::new();
            while let Some(v) = self.advance(&mut cur) {
                out.push(v);
            }
            out
        };
        let s = Arc::new(values);
        if self.strata[dt].len() <= size {
            self.strata[dt].resize(size + 1, None);
        }
        self.strata[dt][size] = Some(s.clone());
        s
    }

    fn advance(&mut self, cur: &mut Cursor) -> Option<DatatypeValue> {
        let emb = self.emb;
        let ctors = &emb.datatypes[cur.dt].constructors;
        loop {
            if cur.active {
                let args: Vec<DatatypeValue> = cur.lists.iter().zip(&cur.idx).map(|(l, &i)| l[i].clone()).collect();
                let value = emb.make(cur.dt, cur.ctor, args);
                // Odometer, last position fastest.
                let mut carry = true;
                for i in (0..cur.idx.len()).rev() {
                    cur.idx[i] += 1;
                    if cur.idx[i] < cur.lists[i].len() {
                        carry = false;
                        break;
                    }
                    cur.idx[i] = 0;
                }
                if carry {
                    cur.active = false;
                }
                return Some(value);
            }
            if cur.ctor >= ctors.len() {
                return None;
            }
            let c = &ctors[cur.ctor];
            if c.args.is_empty() {
                if cur.size == 0 && cur.parts.is_none() {
                    cur.parts = Some(Vec::new());
                    cur.lists.clear();
                    cur.idx.clear();
                    return Some(emb.make(cur.dt, cur.ctor, Vec::new()));
                }
                cur.ctor += 1;
                cur.parts = None;
                continue;
            }
            if cur.size == 0 {
                cur.ctor += 1;
                continue;
            }
            let more = match &mut cur.parts {
                None => {
                    let mut p = alloc::vec![0usize; c.args.len()];
                    *p.last_mut().unwrap() = cur.size - 1;
                    cur.parts = Some(p);
                    true
                }
                Some(p) => next_composition(p),
            };
            if !more {
                cur.ctor += 1;
                cur.parts = None;
                continue;
            }
            let parts = cur.parts.clone().unwrap();
            let arg_idx: Vec<usize> = c.args.iter().map(|a| emb.index_of(a).unwrap()).collect();
            if arg_idx.iter().zip(&parts).any(|(&j, &p)| self.count(j, p) == 0) {
                continue;
            }
            cur.lists = arg_idx.iter().zip(&parts).map(|(&j, &p)| self.stratum(j, p)).collect();
            cur.idx = alloc::vec![0; parts.len()];
            cur.active = true;
        }
    }

    /// Next value of datatype `dt` in size order.
    pub fn next_of(&mut self, dt: usize) -> Next {
        let mut cur = match self.cursors[dt].take() {
            Some(c) => c,
            None => match self.open(dt, 0) {
                Ok(c) => c,
                Err(end) => return Next::End(end),
            },
        };
        loop {
            if let Some(v) = self.advance(&mut cur) {
                if self.strata[dt].get(cur.size).map_or(true, Option::is_none) {
                    self.pending[dt].push(v.clone());
                }
                self.cursors[dt] = Some(cur);
                return Next::Value(v);
            }
            let done = core::mem::take(&mut self.pending[dt]);
            if self.strata[dt].len() <= cur.size {
                self.strata[dt].resize(cur.size + 1, None);
            }
            if self.strata[dt][cur.size].is_none() {
                self.strata[dt][cur.size] = Some(Arc::new(done));
            }
            match self.open(dt, cur.size + 1) {
                Ok(c) => cur = c,
                Err(end) => {
                    // Leave a finished cursor so later calls report the end.
                    let mut fin = Cursor::new(dt, cur.size + 1);
                    fin.ctor = usize::MAX;
                    self.cursors[dt] = Some(fin);
                    return Next::End(end);
                }
            }
        }
    }

    /// Cursor at the first non-empty stratum of size `from` or more.
    fn open(&mut self, dt: usize, from: usize) -> Result<Cursor, StreamEnd> {
        let mut size = from;
        loop {
            if let Some(m) = self.emb.finite_max_size(dt) {
                if size > m {
                    return Err(StreamEnd::Exhausted);
                }
            }
            if let Some(cap) = self.cap {
                if size > cap {
                    return Err(StreamEnd::Capped);
                }
            }
            if self.count(dt, size) > 0 {
                return Ok(Cursor::new(dt, size));
            }
            size += 1;
        }
    }

    /// Size of the stratum datatype `dt`'s stream is currently in.
    pub fn current_size(&self, dt: usize) -> usize {
        self.cursors[dt].as_ref().map_or(0, |c| c.size)
    }
}

/// Stream over one datatype.
pub struct ValueStream<'e> {
    enumerator: Enumerator<'e>,
    dt: usize,
}

impl<'e> ValueStream<'e> {
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.enumerator.cap = Some(cap);
        self
    }

    pub fn next_value(&mut self) -> Next {
        self.enumerator.next_of(self.dt)
    }
}

impl Iterator for ValueStream<'_> {
    type Item = DatatypeValue;

    fn next(&mut self) -> Option<DatatypeValue> {
        match self.next_value() {
            Next::Value(v) => Some(v),
            Next::End(_) => None,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn example2() -> GrammarEmbedding {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let g = GrammarSpec {
            nonterminals: vec![
                crate::problem::Nonterminal {
                    name: "S".to_string(),
                    sort: Sort::Int,
                    productions: vec![
                        Production::Param("x1".to_string()),
                        Production::Param("x2".to_string()),
                        Production::Int(BigInt::from(0)),
                        Production::Int(BigInt::from(1)),
                        Production::Op(Op::Add, s(&["S", "S"])),
                        Production::Op(Op::Sub, s(&["S", "S"])),
                        Production::Op(Op::Ite, s(&["C", "S", "S"])),
                    ],
                },
                crate::problem::Nonterminal {
                    name: "C".to_string(),
                    sort: Sort::Bool,
                    productions: vec![
                        Production::Op(Op::Le, s(&["S", "S"])),
                        Production::Op(Op::Eq, s(&["S", "S"])),
                        Production::Op(Op::And, s(&["C", "C"])),
                        Production::Op(Op::Not, s(&["C"])),
                    ],
                },
            ],
        };
        embed(&g, &[("x1".to_string(), Sort::Int), ("x2".to_string(), Sort::Int)]).unwrap()
    }

    #[test]
    fn example2_shape() {
        let e = example2();
        assert_eq!(e.datatypes[0].constructors.len(), 7);
        assert_eq!(e.datatypes[1].constructors.len(), 4);
        let names: Vec<&str> = e.datatypes[0].constructors.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["x1", "x2", "zero", "one", "plus", "minus", "if"]);
        assert!(e.start_has_ite());
        assert_eq!(e.finite_max_size(0), None);
    }

    #[test]
    fn sizes_and_analogues() {
        let e = example2();
        let x1 = e.value("x1", vec![]).unwrap();
        let x2 = e.value("x2", vec![]).unwrap();
        let plus = e.value("plus", vec![x2.clone(), x2.clone()]).unwrap();
        assert_eq!(term_size(&x1), 0);
        assert_eq!(term_size(&plus), 1);
        assert_eq!(e.analogue(&plus), Term::add(Term::int_var("x2"), Term::int_var("x2")));
        let cond = e.value("leq", vec![x1.clone(), x2.clone()]).unwrap();
        let max = e.value("if", vec![cond, x2.clone(), x1.clone()]).unwrap();
        assert_eq!(term_size(&max), 2);
        assert_eq!(e.eval_program(&max, &[Value::int(1), Value::int(2)]), Ok(Value::int(2)));
        assert_eq!(e.eval_program(&x1, &[Value::int(5), Value::int(7)]), Ok(Value::int(5)));
        assert_eq!(e.conforms(&e.analogue(&max), &e.start), Some(max));
        assert!(e.value("plus", vec![x1]).is_err());
    }

    #[test]
    fn strata_counts() {
        let e = example2();
        let mut en = Enumerator::new(&e);
        assert_eq!(en.count(0, 0), 4);
        assert_eq!(en.count(0, 1), 32);
        assert_eq!(en.count(1, 0), 0);
        let first: Vec<String> = e.enumerate(&e.start).take(4).map(|v| v.to_string()).collect();
        assert_eq!(first, ["x1", "x2", "zero", "one"]);
        let size1 = e.enumerate(&e.start).skip(4).take(32).filter(|v| term_size(v) == 1).count();
        assert_eq!(size1, 32);
    }

    #[test]
    fn finite_grammar_is_exhausted() {
        let g = GrammarSpec {
            nonterminals: vec![crate::problem::Nonterminal {
                name: "S".to_string(),
                sort: Sort::Int,
                productions: vec![Production::Int(BigInt::from(0)), Production::Int(BigInt::from(1))],
            }],
        };
        let e = embed(&g, &[]).unwrap();
        let mut s = e.enumerate(&e.start);
        assert!(matches!(s.next_value(), Next::Value(_)));
        assert!(matches!(s.next_value(), Next::Value(_)));
        assert_eq!(s.next_value(), Next::End(StreamEnd::Exhausted));
        assert_eq!(s.next_value(), Next::End(StreamEnd::Exhausted));
    }

    #[test]
    fn capped_stream_reports_cap() {
        let e = example2();
        let mut s = e.enumerate(&e.start).with_cap(0);
        for _ in 0..4 {
            assert!(matches!(s.next_value(), Next::Value(_)));
        }
        assert_eq!(s.next_value(), Next::End(StreamEnd::Capped));
    }

    #[test]
    fn unsupported_productions_are_rejected() {
        let g = GrammarSpec {
            nonterminals: vec![crate::problem::Nonterminal {
                name: "S".to_string(),
                sort: Sort::Int,
                productions: vec![Production::Unsupported("(let ((z S)) z)".to_string())],
            }],
        };
        assert!(matches!(embed(&g, &[]), Err(GrammarError::UnsupportedProduction(_))));
    }
}
