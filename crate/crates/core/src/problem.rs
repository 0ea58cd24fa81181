//! Synthesis conjectures and grammar restrictions.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::term::{well_sorted_in, Op, Signature, Sort, SortEnv, SortError, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    Lia,
}

/// Signature of the function to synthesize.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Target {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub ret: Sort,
}

impl Target {
    pub fn param_sorts(&self) -> Vec<Sort> {
        self.params.iter().map(|(_, s)| s.clone()).collect()
    }

    pub fn call(&self, args: Vec<Term>) -> Term {
        Term::Call(self.name.clone(), self.ret.clone(), args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Production {
    /// A formal parameter of the target.
    Param(String),
    Int(BigInt),
    Bool(bool),
    /// Operator applied to nonterminals.
    Op(Op, Vec<String>),
    /// A production outside the supported subset, kept as surface text.
    Unsupported(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nonterminal {
    pub name: String,
    pub sort: Sort,
    pub productions: Vec<Production>,
}

/// A grammar; the first nonterminal is the start symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrammarSpec {
    pub nonterminals: Vec<Nonterminal>,
}

impl GrammarSpec {
    pub fn start(&self) -> &Nonterminal {
        &self.nonterminals[0]
    }

    pub fn nonterminal(&self, name: &str) -> Option<&Nonterminal> {
        self.nonterminals.iter().find(|n| n.name == name)
    }

    /// Integer-and-Boolean grammar over the target's parameters: sums,
    /// differences, the constants 0 and 1, comparisons, connectives and ite.
    pub fn default_for(target: &Target) -> GrammarSpec {
        let int = |names: &[&str]| names.iter().map(|n| String::from(*n)).collect::<Vec<_>>();
        let mut i_prods = Vec::new();
        let mut b_prods = Vec::new();
        for (p, s) in &target.params {
            match s {
                Sort::Bool => b_prods.push(Production::Param(p.clone())),
                _ => i_prods.push(Production::Param(p.clone())),
            }
        }
        i_prods.push(Production::Int(BigInt::from(0)));
        i_prods.push(Production::Int(BigInt::from(1)));
        i_prods.push(Production::Op(Op::Add, int(&["I", "I"])));
        i_prods.push(Production::Op(Op::Sub, int(&["I", "I"])));
        i_prods.push(Production::Op(Op::Ite, int(&["B", "I", "I"])));
        b_prods.push(Production::Op(Op::Le, int(&["I", "I"])));
        b_prods.push(Production::Op(Op::Eq, int(&["I", "I"])));
        b_prods.push(Production::Op(Op::And, int(&["B", "B"])));
        b_prods.push(Production::Op(Op::Or, int(&["B", "B"])));
        b_prods.push(Production::Op(Op::Not, int(&["B"])));
        let i = Nonterminal {
            name: String::from("I"),
            sort: Sort::Int,
            productions: i_prods,
        };
        let b = Nonterminal {
            name: String::from("B"),
            sort: Sort::Bool,
            productions: b_prods,
        };
        let nonterminals = if target.ret == Sort::Bool {
            alloc::vec![b, i]
        } else {
            alloc::vec![i, b]
        };
        GrammarSpec { nonterminals }
    }
}

/// `∃f ∀x̄. P[f, x̄]` with an optional grammar restriction on `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SynthProblem {
    pub logic: Logic,
    pub target: Target,
    pub universals: Vec<(String, Sort)>,
    /// Conjuncts of `P`; the target appears as [`Term::Call`].
    pub constraints: Vec<Term>,
    pub grammar: Option<GrammarSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("constraint {index}: {source}")]
    IllSorted { index: usize, source: SortError },
    #[error("constraint {0} is not Bool")]
    NotBool(usize),
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("unknown nonterminal {0}")]
    UnknownNonterminal(String),
    #[error("start symbol {0} does not have the return sort of the function")]
    StartSort(String),
    #[error("grammar is empty")]
    EmptyGrammar,
    #[error("production refers to {0}, which is not a parameter")]
    UnknownParameter(String),
}

struct TargetSig<'a>(&'a Target);

impl Signature for TargetSig<'_> {
    fn function(&self, name: &str) -> Option<(Vec<Sort>, Sort)> {
        (name == self.0.name).then(|| (self.0.param_sorts(), self.0.ret.clone()))
    }
}

impl SynthProblem {
    pub fn sort_env(&self) -> SortEnv {
        self.universals.iter().cloned().collect()
    }

    /// `P` as a single term.
    pub fn conjecture(&self) -> Term {
        Term::and(self.constraints.clone())
    }

    pub fn signature(&self) -> impl Signature + '_ {
        TargetSig(&self.target)
    }

    /// Check sorts, declarations and the grammar's references.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let mut seen = BTreeSet::new();
        for (n, _) in &self.universals {
            if !seen.insert(n.as_str()) || *n == self.target.name {
                return Err(ProblemError::Duplicate(n.clone()));
            }
        }
        let mut pseen = BTreeSet::new();
        for (n, _) in &self.target.params {
            if !pseen.insert(n.as_str()) {
                return Err(ProblemError::Duplicate(n.clone()));
            }
        }
        let env = self.sort_env();
        let sig = self.signature();
        for (index, c) in self.constraints.iter().enumerate() {
            let s = well_sorted_in(c, &env, &sig).map_err(|source| ProblemError::IllSorted { index, source })?;
            if s != Sort::Bool {
                return Err(ProblemError::NotBool(index));
            }
        }
        if let Some(g) = &self.grammar {
            validate_grammar(g, &self.target)?;
        }
        Ok(())
    }
}

fn validate_grammar(g: &GrammarSpec, target: &Target) -> Result<(), ProblemError> {
    if g.nonterminals.is_empty() {
        return Err(ProblemError::EmptyGrammar);
    }
    let mut names = BTreeSet::new();
    for nt in &g.nonterminals {
        if !names.insert(nt.name.as_str()) {
            return Err(ProblemError::Duplicate(nt.name.clone()));
        }
    }
    if g.start().sort != target.ret {
        return Err(ProblemError::StartSort(g.start().name.clone()));
    }
    for nt in &g.nonterminals {
        for p in &nt.productions {
            match p {
                Production::Param(name) => {
                    if !target.params.iter().any(|(n, _)| n == name) {
                        return Err(ProblemError::UnknownParameter(name.clone()));
                    }
                }
                Production::Op(_, args) => {
                    for a in args {
                        if !names.contains(a.as_str()) {
                            return Err(ProblemError::UnknownNonterminal(a.clone()));
                        }
                    }
                }
                Production::Int(_) | Production::Bool(_) | Production::Unsupported(_) => {}
            }
        }
    }
    Ok(())
}
