//! From ground terms to clauses over linear atoms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::TheoryError;
use crate::term::{Op, Sort, Term};

/// `+v` or `-v` for propositional variable `v ≥ 1`.
pub type Lit = i32;

/// `Σ coeffs·x ≤ bound`, coefficients gcd-reduced with a positive leader.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub coeffs: Vec<(usize, BigInt)>,
    pub bound: BigInt,
}

#[derive(Clone, Debug)]
enum Formula {
    Const(bool),
    Lit(Lit),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

fn and(parts: Vec<Formula>) -> Formula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Formula::Const(true) => {}
            Formula::Const(false) => return Formula::Const(false),
            Formula::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Formula::Const(true),
        1 => out.pop().unwrap(),
        _ => Formula::And(out),
    }
}

fn or(parts: Vec<Formula>) -> Formula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Formula::Const(false) => {}
            Formula::Const(true) => return Formula::Const(true),
            Formula::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Formula::Const(false),
        1 => out.pop().unwrap(),
        _ => Formula::Or(out),
    }
}

/// Linear expression over integer variable indices plus a constant.
#[derive(Clone, Debug, Default)]
struct Lin {
    coeffs: BTreeMap<usize, BigInt>,
    constant: BigInt,
}

impl Lin {
    fn add(mut self, other: Lin, sign: i32) -> Lin {
        for (v, c) in other.coeffs {
            let e = self.coeffs.entry(v).or_insert_with(BigInt::zero);
            if sign > 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
        self.coeffs.retain(|_, c| !c.is_zero());
        if sign > 0 {
            self.constant += other.constant;
        } else {
            self.constant -= other.constant;
        }
        self
    }

    fn scale(mut self, k: &BigInt) -> Lin {
        if k.is_zero() {
            return Lin::default();
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }
}

/// Clause database plus the meaning of each propositional variable.
pub struct Encoding {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    /// atoms[v] is the atom of propositional variable v, if any.
    pub atoms: Vec<Option<Atom>>,
    /// Propositional variable of each Bool constant of the environment.
    pub bool_vars: BTreeMap<String, usize>,
    /// Integer variable index of each Int constant; auxiliary variables
    /// introduced for ite terms follow.
    pub int_vars: Vec<String>,
    /// True when some assertion is trivially false.
    pub trivially_false: bool,
}

pub struct Encoder {
    enc: Encoding,
    int_index: BTreeMap<String, usize>,
    atom_index: BTreeMap<Atom, usize>,
    ite_cache: BTreeMap<Term, usize>,
    defs: Vec<Formula>,
}

impl Encoder {
    pub fn new(env: &[(String, Sort)]) -> Self {
        let mut enc = Encoding {
            num_vars: 0,
            clauses: Vec::new(),
            atoms: alloc::vec![None],
            bool_vars: BTreeMap::new(),
            int_vars: Vec::new(),
            trivially_false: false,
        };
        let mut int_index = BTreeMap::new();
        for (name, sort) in env {
            match sort {
                Sort::Int => {
                    int_index.insert(name.clone(), enc.int_vars.len());
                    enc.int_vars.push(name.clone());
                }
                Sort::Bool => {
                    enc.num_vars += 1;
                    enc.atoms.push(None);
                    enc.bool_vars.insert(name.clone(), enc.num_vars);
                }
                Sort::Datatype(_) => {}
            }
        }
        Encoder {
            enc,
            int_index,
            atom_index: BTreeMap::new(),
            ite_cache: BTreeMap::new(),
            defs: Vec::new(),
        }
    }

    fn fresh_prop(&mut self) -> usize {
        self.enc.num_vars += 1;
        self.enc.atoms.push(None);
        self.enc.num_vars
    }

    /// Assert `t`.
    pub fn assert(&mut self, t: &Term) -> Result<(), TheoryError> {
        let f = self.nnf(t, true)?;
        self.assert_formula(f);
        while let Some(d) = self.defs.pop() {
            self.assert_formula(d);
        }
        Ok(())
    }

    fn assert_formula(&mut self, f: Formula) {
        match f {
            Formula::Const(true) => {}
            Formula::Const(false) => self.enc.trivially_false = true,
            Formula::And(parts) => parts.into_iter().for_each(|p| self.assert_formula(p)),
            Formula::Or(parts) => {
                let clause = parts.into_iter().map(|p| self.encode(p)).collect();
                self.enc.clauses.push(clause);
            }
            Formula::Lit(l) => self.enc.clauses.push(alloc::vec![l]),
        }
    }

    /// Literal implying `f` (one-directional definition).
    fn encode(&mut self, f: Formula) -> Lit {
        match f {
            Formula::Lit(l) => l,
            Formula::Const(b) => {
                let v = self.fresh_prop() as Lit;
                self.enc.clauses.push(alloc::vec![if b { v } else { -v }]);
                v
            }
            Formula::And(parts) => {
                let v = self.fresh_prop() as Lit;
                for p in parts {
                    let l = self.encode(p);
                    self.enc.clauses.push(alloc::vec![-v, l]);
                }
                v
            }
            Formula::Or(parts) => {
                let v = self.fresh_prop() as Lit;
                let mut clause = alloc::vec![-v];
                for p in parts {
                    clause.push(self.encode(p));
                }
                self.enc.clauses.push(clause);
                v
            }
        }
    }

    pub fn finish(self) -> Encoding {
        self.enc
    }

    /// Literal for `lin ≤ 0`.
    fn le_zero(&mut self, lin: Lin) -> Formula {
        if lin.coeffs.is_empty() {
            return Formula::Const(!lin.constant.is_positive());
        }
        let g = lin.coeffs.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        let mut coeffs: Vec<(usize, BigInt)> = lin.coeffs.into_iter().map(|(v, c)| (v, c / &g)).collect();
        let mut bound = (-lin.constant).div_floor(&g);
        let mut positive = true;
        if coeffs[0].1.is_negative() {
            // Σ ≤ k  ⇔  ¬(-Σ ≤ -k - 1)
            for (_, c) in coeffs.iter_mut() {
                *c = -&*c;
            }
            bound = -bound - BigInt::one();
            positive = false;
        }
        let atom = Atom { coeffs, bound };
        let v = match self.atom_index.get(&atom) {
            Some(v) => *v,
            None => {
                let v = self.fresh_prop();
                self.enc.atoms[v] = Some(atom.clone());
                self.atom_index.insert(atom, v);
                v
            }
        };
        Formula::Lit(if positive { v as Lit } else { -(v as Lit) })
    }

    /// `a ≤ b`
    fn le(&mut self, a: &Term, b: &Term, slack: i64) -> Result<Formula, TheoryError> {
        let la = self.linear(a)?;
        let lb = self.linear(b)?;
        let mut d = la.add(lb, -1);
        d.constant += slack;
        Ok(self.le_zero(d))
    }

    fn linear(&mut self, t: &Term) -> Result<Lin, TheoryError> {
        Ok(match t {
            Term::Int(v) => Lin {
                coeffs: BTreeMap::new(),
                constant: v.clone(),
            },
            Term::Var(name, Sort::Int) => {
                let i = match self.int_index.get(name) {
                    Some(i) => *i,
                    None => return Err(TheoryError::Unbound(name.clone())),
                };
                let mut coeffs = BTreeMap::new();
                coeffs.insert(i, BigInt::one());
                Lin {
                    coeffs,
                    constant: BigInt::zero(),
                }
            }
            Term::Apply(op, args) => match op {
                Op::Add => {
                    let mut acc = Lin::default();
                    for a in args {
                        acc = acc.add(self.linear(a)?, 1);
                    }
                    acc
                }
                Op::Sub => {
                    let a = self.linear(&args[0])?;
                    a.add(self.linear(&args[1])?, -1)
                }
                Op::Neg => self.linear(&args[0])?.scale(&-BigInt::one()),
                Op::Mul => {
                    let a = self.linear(&args[0])?;
                    let b = self.linear(&args[1])?;
                    if a.coeffs.is_empty() {
                        b.scale(&a.constant)
                    } else if b.coeffs.is_empty() {
                        a.scale(&b.constant)
                    } else {
                        return Err(TheoryError::NonlinearTerm);
                    }
                }
                Op::Ite => {
                    let v = self.purify(t)?;
                    let mut coeffs = BTreeMap::new();
                    coeffs.insert(v, BigInt::one());
                    Lin {
                        coeffs,
                        constant: BigInt::zero(),
                    }
                }
                _ => return Err(TheoryError::IllSorted),
            },
            Term::Call(..) | Term::Eval(..) | Term::Cons(..) => return Err(TheoryError::Unsupported),
            _ => return Err(TheoryError::IllSorted),
        })
    }

    /// Fresh integer variable `v` for an Int ite, defined by
    /// `(¬c ∨ v = a) ∧ (c ∨ v = b)`.
    fn purify(&mut self, t: &Term) -> Result<usize, TheoryError> {
        if let Some(v) = self.ite_cache.get(t) {
            return Ok(*v);
        }
        let args = t.children();
        let v = self.enc.int_vars.len();
        let name = alloc::format!("#ite{}", v);
        self.enc.int_vars.push(name.clone());
        self.int_index.insert(name.clone(), v);
        self.ite_cache.insert(t.clone(), v);
        let var = Term::int_var(name);
        let pos = self.nnf(&args[0], true)?;
        let neg = self.nnf(&args[0], false)?;
        let then_eq = self.nnf(&Term::eq(var.clone(), args[1].clone()), true)?;
        let else_eq = self.nnf(&Term::eq(var, args[2].clone()), true)?;
        self.defs.push(or(alloc::vec![neg, then_eq]));
        self.defs.push(or(alloc::vec![pos, else_eq]));
        Ok(v)
    }

    fn nnf(&mut self, t: &Term, pos: bool) -> Result<Formula, TheoryError> {
        Ok(match t {
            Term::Bool(b) => Formula::Const(*b == pos),
            Term::Var(name, Sort::Bool) => {
                let v = *self
                    .enc
                    .bool_vars
                    .get(name)
                    .ok_or_else(|| TheoryError::Unbound(name.clone()))? as Lit;
                Formula::Lit(if pos { v } else { -v })
            }
            Term::Apply(op, args) => match op {
                Op::Not => self.nnf(&args[0], !pos)?,
                Op::And | Op::Or => {
                    let parts = args.iter().map(|a| self.nnf(a, pos)).collect::<Result<Vec<_>, _>>()?;
                    if (*op == Op::And) == pos {
                        and(parts)
                    } else {
                        or(parts)
                    }
                }
                Op::Implies => {
                    if pos {
                        or(alloc::vec![self.nnf(&args[0], false)?, self.nnf(&args[1], true)?])
                    } else {
                        and(alloc::vec![self.nnf(&args[0], true)?, self.nnf(&args[1], false)?])
                    }
                }
                Op::Eq if args[0].sort() == Sort::Bool => {
                    let (ap, an) = (self.nnf(&args[0], true)?, self.nnf(&args[0], false)?);
                    let (bp, bn) = (self.nnf(&args[1], true)?, self.nnf(&args[1], false)?);
                    if pos {
                        or(alloc::vec![and(alloc::vec![ap, bp]), and(alloc::vec![an, bn])])
                    } else {
                        or(alloc::vec![and(alloc::vec![ap, bn]), and(alloc::vec![an, bp])])
                    }
                }
                Op::Eq => {
                    let (a, b) = (&args[0], &args[1]);
                    if pos {
                        and(alloc::vec![self.le(a, b, 0)?, self.le(b, a, 0)?])
                    } else {
                        or(alloc::vec![self.le(a, b, 1)?, self.le(b, a, 1)?])
                    }
                }
                Op::Le => {
                    if pos {
                        self.le(&args[0], &args[1], 0)?
                    } else {
                        self.le(&args[1], &args[0], 1)?
                    }
                }
                Op::Lt => {
                    if pos {
                        self.le(&args[0], &args[1], 1)?
                    } else {
                        self.le(&args[1], &args[0], 0)?
                    }
                }
                Op::Ge => {
                    if pos {
                        self.le(&args[1], &args[0], 0)?
                    } else {
                        self.le(&args[0], &args[1], 1)?
                    }
                }
                Op::Gt => {
                    if pos {
                        self.le(&args[1], &args[0], 1)?
                    } else {
                        self.le(&args[0], &args[1], 0)?
                    }
                }
                Op::Ite => {
                    let (cp, cn) = (self.nnf(&args[0], true)?, self.nnf(&args[0], false)?);
                    let a = self.nnf(&args[1], pos)?;
                    let b = self.nnf(&args[2], pos)?;
                    or(alloc::vec![and(alloc::vec![cp, a]), and(alloc::vec![cn, b])])
                }
                Op::Add | Op::Sub | Op::Neg | Op::Mul => return Err(TheoryError::IllSorted),
            },
            Term::Call(..) | Term::Eval(..) | Term::Cons(..) => return Err(TheoryError::Unsupported),
            _ => return Err(TheoryError::IllSorted),
        })
    }
}
