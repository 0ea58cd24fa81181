//! Syntax-guided synthesis over linear integer arithmetic.
//!
//! Terms, normal forms and solution simplification live in [`term`],
//! [`normal`] and [`simplify`]; grammars become datatype families in
//! [`grammar`]; [`theory`] decides ground linear queries; [`engine`] holds
//! the single-invocation and enumerative strategies; [`reconstruct`] maps
//! unrestricted solutions back into a grammar.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod grammar;
pub mod normal;
pub mod problem;
pub mod reconstruct;
pub mod simplify;
pub mod term;
pub mod theory;

pub use engine::{solve, Limits, Outcome, Resource, Solution, Strategy};
pub use grammar::{embed, term_size, DatatypeValue, GrammarEmbedding};
pub use normal::{normalize, NormalTerm};
pub use problem::{GrammarSpec, Logic, Nonterminal, Production, SynthProblem, Target};
pub use simplify::simplify_solution;
pub use term::{eval_ground, substitute, well_sorted, Assignment, Lambda, Op, Sort, Term, Value};
