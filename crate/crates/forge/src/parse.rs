//! Reader for the supported SyGuS subset.
//!
//! ```text
//! file := (set-logic LIA) (synth-fun id ((id sort)*) sort grammar?)
//!         (declare-var id sort)* (constraint term)* (check-synth)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use sygus_forge_core::{GrammarSpec, Logic, Nonterminal, Op, Production, Sort, SynthProblem, Target, Term};

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unsupported feature: {name}")]
    UnsupportedFeature { line: usize, col: usize, name: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::UnsupportedFeature { line, col, .. } => Pos {
                line: *line,
                col: *col,
            },
        }
    }
}

fn syntax<T>(at: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        line: at.line,
        col: at.col,
        message: message.into(),
    })
}

fn unsupported<T>(at: Pos, name: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::UnsupportedFeature {
        line: at.line,
        col: at.col,
        name: name.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Symbol(String, Pos),
    Numeral(BigInt, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::Numeral(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

fn symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Every top-level s-expression of the input.
    fn read_all(&mut self) -> Result<Vec<Sexp>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_blank();
            if self.chars.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read()?);
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        // Explicit stack so deeply nested input cannot overflow.
        let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
        loop {
            self.skip_blank();
            let at = self.pos;
            let c = match self.chars.peek() {
                None => return syntax(at, "unexpected end of input"),
                Some(&c) => c,
            };
            let item = match c {
                '(' => {
                    self.bump();
                    stack.push((Vec::new(), at));
                    continue;
                }
                ')' => {
                    self.bump();
                    match stack.pop() {
                        None => return syntax(at, "unbalanced ')'"),
                        Some((items, p)) => Sexp::List(items, p),
                    }
                }
                _ => self.atom()?,
            };
            match stack.last_mut() {
                None => return Ok(item),
                Some((items, _)) => items.push(item),
            }
        }
    }

    fn atom(&mut self) -> Result<Sexp, ParseError> {
        let at = self.pos;
        let c = *self.chars.peek().unwrap();
        match c {
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return syntax(at, "unterminated quoted symbol"),
                        Some('|') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) || !s.chars().all(symbol_char) {
                    return unsupported(at, "quoted symbol that is not a simple symbol");
                }
                Ok(Sexp::Symbol(s, at))
            }
            '"' => unsupported(at, "string literal"),
            '#' => unsupported(at, "bit-vector literal"),
            ':' => unsupported(at, "attribute"),
            _ if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if !symbol_char(d) {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                if s.contains('.') {
                    return unsupported(at, "decimal literal");
                }
                match s.parse::<BigInt>() {
                    Ok(v) if s.chars().all(|d| d.is_ascii_digit()) => Ok(Sexp::Numeral(v, at)),
                    _ => syntax(at, format!("malformed numeral '{}'", s)),
                }
            }
            _ if symbol_char(c) => {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if !symbol_char(d) {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                Ok(Sexp::Symbol(s, at))
            }
            _ => syntax(at, format!("unexpected character '{}'", c.escape_default())),
        }
    }
}

fn parse_sort(s: &Sexp) -> Result<Sort, ParseError> {
    match s {
        Sexp::Symbol(n, p) => match n.as_str() {
            "Int" => Ok(Sort::Int),
            "Bool" => Ok(Sort::Bool),
            "Real" | "String" => unsupported(*p, format!("sort {}", n)),
            _ => syntax(*p, format!("unknown sort '{}'", n)),
        },
        Sexp::List(items, p) => match items.first().and_then(Sexp::symbol) {
            Some("_") if items.get(1).and_then(Sexp::symbol) == Some("BitVec") => unsupported(*p, "bit-vectors"),
            Some("Array") => unsupported(*p, "arrays"),
            _ => syntax(*p, "expected a sort"),
        },
        Sexp::Numeral(_, p) => syntax(*p, "expected a sort"),
    }
}

fn ident(s: &Sexp, what: &str) -> Result<String, ParseError> {
    match s {
        Sexp::Symbol(n, _) => Ok(n.clone()),
        other => syntax(other.pos(), format!("expected {}", what)),
    }
}

const RESERVED: &[&str] = &[
    "+", "-", "*", "<=", "<", ">=", ">", "=", "and", "or", "not", "=>", "ite", "true", "false", "let", "Int", "Bool",
];

fn builtin(name: &str) -> Option<Op> {
    Some(match name {
        "+" => Op::Add,
        "-" => Op::Sub,
        "*" => Op::Mul,
        "<=" => Op::Le,
        "<" => Op::Lt,
        ">=" => Op::Ge,
        ">" => Op::Gt,
        "=" => Op::Eq,
        "not" => Op::Not,
        "and" => Op::And,
        "or" => Op::Or,
        "=>" => Op::Implies,
        "ite" => Op::Ite,
        _ => return None,
    })
}

/// LIA operators outside the supported set.
fn known_unsupported(name: &str) -> bool {
    matches!(name, "div" | "mod" | "abs" | "distinct" | "xor" | "/" | "to_real" | "to_int" | "is_int")
}

struct Scope<'a> {
    vars: &'a BTreeMap<String, Sort>,
    target: &'a Target,
}

impl Scope<'_> {
    fn typed(&self, s: &Sexp) -> Result<(Term, Sort), ParseError> {
        match s {
            Sexp::Numeral(v, _) => Ok((Term::Int(v.clone()), Sort::Int)),
            Sexp::Symbol(n, p) => match n.as_str() {
                "true" => Ok((Term::Bool(true), Sort::Bool)),
                "false" => Ok((Term::Bool(false), Sort::Bool)),
                _ => {
                    if let Some(sort) = self.vars.get(n) {
                        return Ok((Term::var(n.clone(), sort.clone()), sort.clone()));
                    }
                    if *n == self.target.name {
                        if !self.target.params.is_empty() {
                            return syntax(*p, format!("'{}' must be applied to {} arguments", n, self.target.params.len()));
                        }
                        return Ok((self.target.call(Vec::new()), self.target.ret.clone()));
                    }
                    syntax(*p, format!("unknown identifier '{}'", n))
                }
            },
            Sexp::List(items, p) => self.application(items, *p),
        }
    }

    fn application(&self, items: &[Sexp], at: Pos) -> Result<(Term, Sort), ParseError> {
        let head = match items.first() {
            None => return syntax(at, "empty application"),
            Some(Sexp::Symbol(h, _)) => h.as_str(),
            Some(other) => return syntax(other.pos(), "expected an operator"),
        };
        let args = &items[1..];
        if head == "let" {
            return unsupported(at, "let");
        }
        if head == self.target.name {
            if args.len() != self.target.params.len() {
                return syntax(
                    at,
                    format!("'{}' expects {} arguments, got {}", head, self.target.params.len(), args.len()),
                );
            }
            let mut ts = Vec::new();
            for (a, (_, want)) in args.iter().zip(&self.target.params) {
                let (t, s) = self.typed(a)?;
                if s != *want {
                    return syntax(a.pos(), format!("argument of '{}' should be {}", head, want));
                }
                ts.push(t);
            }
            return Ok((self.target.call(ts), self.target.ret.clone()));
        }
        if known_unsupported(head) {
            return unsupported(at, head.to_string());
        }
        let op = match builtin(head) {
            Some(op) => op,
            None => return syntax(items[0].pos(), format!("unknown function '{}'", head)),
        };
        // (- n) is a negative literal.
        if op == Op::Sub && args.len() == 1 {
            if let Sexp::Numeral(v, _) = &args[0] {
                return Ok((Term::Int(-v.clone()), Sort::Int));
            }
        }
        let mut ts = Vec::new();
        let mut sorts = Vec::new();
        for a in args {
            let (t, s) = self.typed(a)?;
            ts.push(t);
            sorts.push(s);
        }
        let expect = |want: Sort, idx: usize| -> Result<(), ParseError> {
            if sorts[idx] != want {
                return syntax(args[idx].pos(), format!("expected {} argument to '{}'", want, head));
            }
            Ok(())
        };
        let arity = |lo: usize, hi: Option<usize>| -> Result<(), ParseError> {
            if args.len() < lo || hi.is_some_and(|h| args.len() > h) {
                return syntax(at, format!("wrong number of arguments to '{}'", head));
            }
            Ok(())
        };
        let (op, sort) = match op {
            Op::Add => {
                arity(2, None)?;
                (Op::Add, Sort::Int)
            }
            Op::Sub => {
                arity(1, Some(2))?;
                (if args.len() == 1 { Op::Neg } else { Op::Sub }, Sort::Int)
            }
            Op::Mul => {
                arity(2, Some(2))?;
                if !ts.iter().any(|t| matches!(t, Term::Int(_))) {
                    return unsupported(at, "nonlinear multiplication");
                }
                (Op::Mul, Sort::Int)
            }
            Op::Le | Op::Lt | Op::Ge | Op::Gt => {
                arity(2, Some(2))?;
                (op, Sort::Bool)
            }
            Op::Eq => {
                arity(2, Some(2))?;
                if sorts[0] != sorts[1] {
                    return syntax(at, "'=' compares terms of different sorts");
                }
                (Op::Eq, Sort::Bool)
            }
            Op::Not => {
                arity(1, Some(1))?;
                (Op::Not, Sort::Bool)
            }
            Op::And | Op::Or => {
                arity(2, None)?;
                (op, Sort::Bool)
            }
            Op::Implies => {
                arity(2, Some(2))?;
                (op, Sort::Bool)
            }
            Op::Ite => {
                arity(3, Some(3))?;
                expect(Sort::Bool, 0)?;
                if sorts[1] != sorts[2] {
                    return syntax(at, "'ite' branches have different sorts");
                }
                let s = sorts[1].clone();
                return Ok((Term::Apply(Op::Ite, ts), s));
            }
            Op::Neg => unreachable!(),
        };
        let arg_sort = match op {
            Op::Add | Op::Sub | Op::Neg | Op::Mul | Op::Le | Op::Lt | Op::Ge | Op::Gt => Some(Sort::Int),
            Op::Not | Op::And | Op::Or | Op::Implies => Some(Sort::Bool),
            _ => None,
        };
        if let Some(want) = arg_sort {
            for i in 0..ts.len() {
                expect(want.clone(), i)?;
            }
        }
        Ok((Term::Apply(op, ts), sort))
    }
}

fn parse_production(s: &Sexp, nts: &BTreeMap<String, Sort>, params: &[(String, Sort)], sort: &Sort) -> Result<Production, ParseError> {
    let check = |got: Sort, at: Pos| -> Result<(), ParseError> {
        if got != *sort {
            return syntax(at, format!("production of sort {} in a {} nonterminal", got, sort));
        }
        Ok(())
    };
    match s {
        Sexp::Numeral(v, p) => {
            check(Sort::Int, *p)?;
            Ok(Production::Int(v.clone()))
        }
        Sexp::Symbol(n, p) => {
            if n == "true" || n == "false" {
                check(Sort::Bool, *p)?;
                return Ok(Production::Bool(n == "true"));
            }
            if let Some((_, ps)) = params.iter().find(|(q, _)| q == n) {
                check(ps.clone(), *p)?;
                return Ok(Production::Param(n.clone()));
            }
            if nts.contains_key(n) {
                return unsupported(*p, "nonterminal alias production");
            }
            syntax(*p, format!("'{}' is neither a parameter nor a literal", n))
        }
        Sexp::List(items, p) => {
            let head = match items.first() {
                Some(Sexp::Symbol(h, _)) => h.as_str(),
                _ => return syntax(*p, "expected an operator production"),
            };
            if head == "Constant" || head == "Variable" || head == "InputVariable" || head == "LocalVariable" {
                return unsupported(*p, head.to_string());
            }
            if head == "-" && items.len() == 2 {
                if let Sexp::Numeral(v, _) = &items[1] {
                    check(Sort::Int, *p)?;
                    return Ok(Production::Int(-v.clone()));
                }
            }
            if known_unsupported(head) {
                return unsupported(items[0].pos(), head.to_string());
            }
            let mut args = Vec::new();
            for a in &items[1..] {
                match a {
                    Sexp::Symbol(n, _) if nts.contains_key(n) => args.push(n.clone()),
                    other => return unsupported(other.pos(), "production argument that is not a nonterminal"),
                }
            }
            let op = match builtin(head) {
                Some(Op::Sub) if args.len() == 1 => Op::Neg,
                Some(op) => op,
                None => return syntax(items[0].pos(), format!("unknown operator '{}'", head)),
            };
            let arg_sorts: Vec<&Sort> = args.iter().map(|a| &nts[a]).collect();
            let (want_args, result): (Option<Sort>, Sort) = match op {
                Op::Add | Op::Sub | Op::Neg | Op::Mul => (Some(Sort::Int), Sort::Int),
                Op::Le | Op::Lt | Op::Ge | Op::Gt => (Some(Sort::Int), Sort::Bool),
                Op::Not | Op::And | Op::Or | Op::Implies => (Some(Sort::Bool), Sort::Bool),
                Op::Eq => (None, Sort::Bool),
                Op::Ite => (None, arg_sorts.get(1).map(|s| (*s).clone()).unwrap_or(Sort::Int)),
            };
            let (lo, hi) = match op {
                Op::Neg | Op::Not => (1, 1),
                Op::Ite => (3, 3),
                Op::Add | Op::And | Op::Or => (2, usize::MAX),
                _ => (2, 2),
            };
            if args.len() < lo || args.len() > hi {
                return syntax(*p, format!("wrong number of arguments to '{}'", head));
            }
            let ok = match op {
                Op::Eq => arg_sorts[0] == arg_sorts[1],
                Op::Ite => *arg_sorts[0] == Sort::Bool && arg_sorts[1] == arg_sorts[2],
                _ => arg_sorts.iter().all(|s| Some(*s) == want_args.as_ref()),
            };
            if !ok {
                return syntax(*p, format!("ill-sorted production for '{}'", head));
            }
            check(result, *p)?;
            Ok(Production::Op(op, args))
        }
    }
}

fn parse_grammar(s: &Sexp, target: &Target) -> Result<GrammarSpec, ParseError> {
    let decls = match s.list() {
        Some(d) if !d.is_empty() => d,
        _ => return syntax(s.pos(), "expected a grammar"),
    };
    let mut nts = BTreeMap::new();
    let mut heads = Vec::new();
    for d in decls {
        let parts = match d.list() {
            Some(p) if p.len() == 3 => p,
            _ => return syntax(d.pos(), "expected (name sort (productions))"),
        };
        let name = ident(&parts[0], "a nonterminal name")?;
        if RESERVED.contains(&name.as_str()) || target.params.iter().any(|(p, _)| *p == name) {
            return syntax(parts[0].pos(), format!("'{}' cannot name a nonterminal", name));
        }
        let sort = parse_sort(&parts[1])?;
        if nts.insert(name.clone(), sort.clone()).is_some() {
            return syntax(parts[0].pos(), format!("nonterminal '{}' declared twice", name));
        }
        heads.push((name, sort, &parts[2]));
    }
    let mut nonterminals = Vec::new();
    for (i, (name, sort, prods)) in heads.into_iter().enumerate() {
        if i == 0 && sort != target.ret {
            return syntax(decls[0].pos(), "the start nonterminal must have the function's return sort");
        }
        let items = match prods.list() {
            Some(items) if !items.is_empty() => items,
            _ => return syntax(prods.pos(), "expected a non-empty production list"),
        };
        let mut productions = Vec::new();
        for pr in items {
            productions.push(parse_production(pr, &nts, &target.params, &sort)?);
        }
        nonterminals.push(Nonterminal { name, sort, productions });
    }
    Ok(GrammarSpec { nonterminals })
}

/// Parse and validate a problem.
pub fn parse(text: &str) -> Result<SynthProblem, ParseError> {
    let mut lx = Lexer::new(text);
    let cmds = lx.read_all()?;
    let end = lx.pos;
    let mut logic = None;
    let mut target: Option<(Target, Option<GrammarSpec>)> = None;
    let mut vars: BTreeMap<String, Sort> = BTreeMap::new();
    let mut universals = Vec::new();
    let mut constraints = Vec::new();
    let mut checked = false;
    for c in &cmds {
        let items = match c.list() {
            Some(items) if !items.is_empty() => items,
            _ => return syntax(c.pos(), "expected a command"),
        };
        let at = c.pos();
        let head = match items[0].symbol() {
            Some(h) => h,
            None => return syntax(items[0].pos(), "expected a command name"),
        };
        if checked {
            return syntax(at, "command after check-synth");
        }
        match head {
            "set-logic" => {
                if logic.is_some() || target.is_some() {
                    return syntax(at, "set-logic must come first, once");
                }
                match items.get(1).and_then(Sexp::symbol) {
                    Some("LIA") if items.len() == 2 => logic = Some(Logic::Lia),
                    Some(other) if items.len() == 2 => return unsupported(items[1].pos(), format!("logic {}", other)),
                    _ => return syntax(at, "expected (set-logic LIA)"),
                }
            }
            "synth-fun" => {
                if logic.is_none() {
                    return syntax(at, "set-logic must come first");
                }
                if target.is_some() {
                    return unsupported(at, "multiple synth-fun");
                }
                if !vars.is_empty() || !constraints.is_empty() {
                    return syntax(at, "synth-fun must precede declarations");
                }
                if items.len() != 4 && items.len() != 5 {
                    return syntax(at, "expected (synth-fun name (params) sort grammar?)");
                }
                let name = ident(&items[1], "a function name")?;
                if RESERVED.contains(&name.as_str()) {
                    return syntax(items[1].pos(), format!("'{}' is reserved", name));
                }
                let plist = match items[2].list() {
                    Some(l) => l,
                    None => return syntax(items[2].pos(), "expected a parameter list"),
                };
                let mut params: Vec<(String, Sort)> = Vec::new();
                for pd in plist {
                    let pair = match pd.list() {
                        Some(p) if p.len() == 2 => p,
                        _ => return syntax(pd.pos(), "expected (name sort)"),
                    };
                    let pn = ident(&pair[0], "a parameter name")?;
                    if RESERVED.contains(&pn.as_str()) || pn == name {
                        return syntax(pair[0].pos(), format!("'{}' cannot name a parameter", pn));
                    }
                    if params.iter().any(|(q, _)| *q == pn) {
                        return syntax(pair[0].pos(), format!("parameter '{}' declared twice", pn));
                    }
                    params.push((pn, parse_sort(&pair[1])?));
                }
                let ret = parse_sort(&items[3])?;
                let t = Target { name, params, ret };
                let g = match items.get(4) {
                    Some(g) => Some(parse_grammar(g, &t)?),
                    None => None,
                };
                target = Some((t, g));
            }
            "declare-var" => {
                let (t, _) = match &target {
                    Some(t) => t,
                    None => return syntax(at, "declare-var before synth-fun"),
                };
                if items.len() != 3 {
                    return syntax(at, "expected (declare-var name sort)");
                }
                let n = ident(&items[1], "a variable name")?;
                if RESERVED.contains(&n.as_str()) || n == t.name {
                    return syntax(items[1].pos(), format!("'{}' cannot name a variable", n));
                }
                let s = parse_sort(&items[2])?;
                if vars.insert(n.clone(), s.clone()).is_some() {
                    return syntax(items[1].pos(), format!("variable '{}' declared twice", n));
                }
                universals.push((n, s));
            }
            "constraint" => {
                let (t, _) = match &target {
                    Some(t) => t,
                    None => return syntax(at, "constraint before synth-fun"),
                };
                if items.len() != 2 {
                    return syntax(at, "expected (constraint term)");
                }
                let scope = Scope { vars: &vars, target: t };
                let (term, sort) = scope.typed(&items[1])?;
                if sort != Sort::Bool {
                    return syntax(items[1].pos(), "constraint is not Bool");
                }
                constraints.push(term);
            }
            "check-synth" => {
                if items.len() != 1 {
                    return syntax(at, "check-synth takes no arguments");
                }
                if target.is_none() {
                    return syntax(at, "check-synth before synth-fun");
                }
                checked = true;
            }
            "define-fun" | "declare-fun" | "synth-inv" | "inv-constraint" | "declare-datatype"
            | "declare-datatypes" | "set-option" | "declare-primed-var" | "define-sort" => {
                return unsupported(at, head.to_string())
            }
            other => return syntax(items[0].pos(), format!("unknown command '{}'", other)),
        }
    }
    if !checked {
        return syntax(end, "missing (check-synth)");
    }
    let (target, grammar) = target.expect("checked implies synth-fun");
    let p = SynthProblem {
        logic: logic.expect("checked implies set-logic"),
        target,
        universals,
        constraints,
        grammar,
    };
    if let Err(e) = p.validate() {
        return syntax(end, e.to_string());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MAX2: &str = "(set-logic LIA)
(synth-fun max2 ((x1 Int) (x2 Int)) Int
  ((S Int (x1 x2 0 1 (+ S S) (- S S) (ite C S S)))
   (C Bool ((<= S S) (= S S) (and C C) (not C)))))
(declare-var x1 Int) (declare-var x2 Int)
(constraint (>= (max2 x1 x2) x1))
(constraint (>= (max2 x1 x2) x2))
(constraint (or (= (max2 x1 x2) x1) (= (max2 x1 x2) x2)))
(check-synth)
";

    #[test]
    fn reads_max2() {
        let p = parse(MAX2).unwrap();
        assert_eq!(p.universals.len(), 2);
        assert_eq!(p.constraints.len(), 3);
        let g = p.grammar.unwrap();
        assert_eq!(g.nonterminals[0].productions.len(), 7);
        assert_eq!(g.nonterminals[1].productions.len(), 4);
    }

    #[test]
    fn other_logics_are_unsupported() {
        let e = parse("(set-logic BV)").unwrap_err();
        assert!(matches!(e, ParseError::UnsupportedFeature { line: 1, col: 12, .. }), "{:?}", e);
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse("(set-logic LIA)\n(synth-fun f ((x Int)) Int)\n(constraint (= (f y) 0))").unwrap_err();
        assert_eq!(e.pos(), Pos { line: 3, col: 19 });
        let e = parse("(set-logic LIA)\n(synth-fun f () Int)\n(constraint (let ((a 1)) true))").unwrap_err();
        assert!(matches!(e, ParseError::UnsupportedFeature { line: 3, .. }));
        assert!(parse("(set-logic LIA)\n(synth-fun f () Int)\n(check-synth)\n)").is_err());
    }

    #[test]
    fn negative_literals_and_scaling() {
        let p = parse(
            "(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int)
             (constraint (= (f x) (+ (* 2 x) (- 3)))) (check-synth)",
        )
        .unwrap();
        assert_eq!(p.constraints[0].to_string(), "(= (f x) (+ (* 2 x) (- 3)))");
        let e = parse("(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) (constraint (= (f x) (* x x))) (check-synth)");
        assert!(matches!(e, Err(ParseError::UnsupportedFeature { .. })));
    }
}
