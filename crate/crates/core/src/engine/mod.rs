//! Synthesis strategies and their orchestration.

mod cegis;
mod si;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicBool, Ordering};

pub use cegis::{points_filter, solve_cegis};
pub use si::{
    build_ite_solution, detect_single_invocation, select_instantiation_term, solve_si, Exhausted, SiState,
    SingleInvocationSpec,
};

use crate::grammar::{embed, DatatypeValue, GrammarEmbedding, GrammarError};
use crate::problem::{GrammarSpec, ProblemError, SynthProblem};
use crate::reconstruct::reconstruct_solution;
use crate::term::{Assignment, Lambda, Term, Value};
use crate::theory::{find_counterexample_with, Budget, TheoryError};

/// Resource limits shared by all strategies.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Candidates proposed by enumerative search.
    pub candidates: u64,
    /// Largest term size enumerative search considers.
    pub max_size: usize,
    /// Instantiation rounds of the single-invocation loop.
    pub si_iterations: usize,
    /// Branch-and-bound nodes per theory query.
    pub theory_nodes: u64,
    /// Grammar values enumerated during one reconstruction.
    pub recon_values: usize,
    /// Raised by another thread to abandon the search.
    pub stop: Option<Arc<AtomicBool>>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            candidates: 1_000_000,
            max_size: 8,
            si_iterations: 10_000,
            theory_nodes: crate::theory::DEFAULT_NODES,
            recon_values: 100_000,
            stop: None,
        }
    }
}

impl Limits {
    pub fn budget(&self) -> Budget {
        Budget::new(self.theory_nodes, self.stop.clone())
    }

    pub fn cancelled(&self) -> bool {
        self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
    }
}

/// Which limit stopped a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resource {
    Candidates,
    SizeBound,
    Iterations,
    TheoryNodes,
    Reconstruction,
    /// The instantiation heuristic has no fresh term to offer.
    Stalled,
    Cancelled,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Candidates => "candidate budget exhausted",
            Resource::SizeBound => "size bound reached",
            Resource::Iterations => "iteration budget exhausted",
            Resource::TheoryNodes => "theory node budget exhausted",
            Resource::Reconstruction => "reconstruction budget exhausted",
            Resource::Stalled => "instantiation stalled",
            Resource::Cancelled => "cancelled",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    /// Single invocation when applicable and reconstructible, else CEGIS.
    Auto,
    /// Single invocation, then reconstruction into the grammar.
    Si,
    /// Single invocation ignoring the grammar.
    SiR,
    /// Enumerative CEGIS over the grammar.
    Cegis,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Si => "si",
            Strategy::SiR => "si-r",
            Strategy::Cegis => "cegis",
        })
    }
}

/// A synthesized function with how it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub lambda: Lambda,
    pub strategy: Strategy,
    pub iterations: usize,
    /// Node count of the body.
    pub size: usize,
    /// The grammar value whose analogue is the body, when it conforms.
    pub program: Option<DatatypeValue>,
    /// False when the grammar was ignored and the body does not conform.
    pub grammar_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(Solution),
    /// Proven: no function (in the grammar) satisfies the constraints.
    NoSolution,
    ResourceOut(Resource),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("grammar: {0}")]
    Grammar(#[from] GrammarError),
    #[error("theory: {0}")]
    Theory(TheoryError),
    #[error("the problem is not single-invocation")]
    NotSingleInvocation,
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::term::EvalError),
    #[error("internal error: returned solution fails verification")]
    Unverified,
}

/// Theory failures that mean "ran out" rather than "went wrong".
pub(crate) fn theory_outcome(e: TheoryError) -> Result<Outcome, EngineError> {
    match e {
        TheoryError::ResourceOut => Ok(Outcome::ResourceOut(Resource::TheoryNodes)),
        TheoryError::Cancelled => Ok(Outcome::ResourceOut(Resource::Cancelled)),
        other => Err(EngineError::Theory(other)),
    }
}

/// One line of the iteration trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// A CEGIS candidate and the counterexample refuting it (None when it
    /// was accepted).
    Candidate {
        program: DatatypeValue,
        cex: Option<Assignment>,
    },
    /// A single-invocation model value for `e` and the chosen instance.
    Instance { e: Value, instance: Term },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Candidate { program, cex } => match cex {
                Some(a) => write!(f, "candidate {} | cex {}", program, a),
                None => write!(f, "candidate {} | cex none", program),
            },
            TraceEvent::Instance { e, instance } => write!(f, "model e={} | instance {}", e, instance),
        }
    }
}

pub trait Observer {
    fn event(&mut self, e: &TraceEvent);
}

/// Discards events.
pub struct Silent;

impl Observer for Silent {
    fn event(&mut self, _: &TraceEvent) {}
}

impl Observer for Vec<TraceEvent> {
    fn event(&mut self, e: &TraceEvent) {
        self.push(e.clone());
    }
}

/// The embedding used by enumerative search: the problem's grammar, or the
/// default integer grammar when none is given.
pub fn embedding_for(p: &SynthProblem) -> Result<GrammarEmbedding, EngineError> {
    let g = match &p.grammar {
        Some(g) => g.clone(),
        None => GrammarSpec::default_for(&p.target),
    };
    Ok(embed(&g, &p.target.params)?)
}

/// Strategy `auto` would pick for `p`.
pub fn route(p: &SynthProblem) -> Result<Strategy, EngineError> {
    if detect_single_invocation(p).is_none() {
        return Ok(Strategy::Cegis);
    }
    match &p.grammar {
        None => Ok(Strategy::Si),
        Some(_) => {
            if embedding_for(p)?.start_has_ite() {
                Ok(Strategy::Si)
            } else {
                Ok(Strategy::Cegis)
            }
        }
    }
}

/// Solve `p`; every returned solution has been checked to have no
/// counterexample.
pub fn solve(
    p: &SynthProblem,
    strategy: Strategy,
    limits: &Limits,
    obs: &mut dyn Observer,
) -> Result<Outcome, EngineError> {
    p.validate()?;
    if strategy == Strategy::Auto {
        let routed = route(p)?;
        let outcome = solve(p, routed, limits, obs)?;
        if routed == Strategy::Si && outcome == Outcome::ResourceOut(Resource::Reconstruction) {
            return solve(p, Strategy::Cegis, limits, obs);
        }
        return Ok(outcome);
    }
    let outcome = match strategy {
        Strategy::Cegis => {
            let emb = embedding_for(p)?;
            solve_cegis(p, &emb, limits, obs)?
        }
        Strategy::Si | Strategy::SiR => {
            let spec = detect_single_invocation(p).ok_or(EngineError::NotSingleInvocation)?;
            match solve_si(&spec, limits, obs)? {
                Outcome::Solved(sol) => finish_si(p, sol, strategy, limits)?,
                other => other,
            }
        }
        Strategy::Auto => unreachable!(),
    };
    if let Outcome::Solved(sol) = &outcome {
        match find_counterexample_with(&sol.lambda, p, &mut limits.budget()) {
            Ok(None) => {}
            Ok(Some(_)) => return Err(EngineError::Unverified),
            Err(e) => return theory_outcome(e),
        }
    }
    Ok(outcome)
}

fn finish_si(p: &SynthProblem, mut sol: Solution, strategy: Strategy, limits: &Limits) -> Result<Outcome, EngineError> {
    sol.strategy = strategy;
    let g = match &p.grammar {
        None => {
            sol.grammar_checked = true;
            return Ok(Outcome::Solved(sol));
        }
        Some(g) => g,
    };
    let emb = embed(g, &p.target.params)?;
    let start = emb.start.clone();
    if strategy == Strategy::SiR {
        sol.program = emb.conforms(&sol.lambda.body, &start);
        sol.grammar_checked = sol.program.is_some();
        return Ok(Outcome::Solved(sol));
    }
    match reconstruct_solution(&sol.lambda, &emb, limits)? {
        Outcome::Solved(r) => {
            sol.program = emb.conforms(&r.lambda.body, &start);
            sol.grammar_checked = sol.program.is_some();
            sol.size = r.lambda.body.size();
            sol.lambda = r.lambda;
            Ok(Outcome::Solved(sol))
        }
        other => Ok(other),
    }
}

pub(crate) fn fresh(name: &str) -> String {
    alloc::format!("#{}", name)
}
