//! Running strategies under a wall-clock limit.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use sygus_forge_core::engine::{EngineError, Observer, TraceEvent};
use sygus_forge_core::theory::find_counterexample;
use sygus_forge_core::{solve, Limits, Outcome, Resource, Solution, Strategy, SynthProblem};

/// Strategy selection on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Single(Strategy),
    /// si and cegis side by side; the first decisive answer wins.
    Portfolio,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => Mode::Single(Strategy::Auto),
            "si" => Mode::Single(Strategy::Si),
            "si-r" => Mode::Single(Strategy::SiR),
            "cegis" => Mode::Single(Strategy::Cegis),
            "portfolio" => Mode::Portfolio,
            other => return Err(format!("unknown strategy '{}'", other)),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Single(s) => s.fmt(f),
            Mode::Portfolio => f.write_str("portfolio"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    NoSolution,
    ResourceOut,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Solved => "solved",
            Status::NoSolution => "no-solution",
            Status::ResourceOut => "resource-out",
        })
    }
}

/// One run of one problem.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub problem: String,
    pub strategy: Mode,
    pub status: Status,
    pub seconds: f64,
    pub size: Option<usize>,
    pub iterations: usize,
    pub solution: Option<Solution>,
    pub resource: Option<Resource>,
}

pub struct Settings {
    pub mode: Mode,
    pub timeout: Duration,
    pub max_size: usize,
}

/// Writes each event to stderr, tagged with the strategy when several run.
pub struct StderrTrace(pub Option<Strategy>);

impl Observer for StderrTrace {
    fn event(&mut self, e: &TraceEvent) {
        match self.0 {
            Some(s) => eprintln!("[{}] {}", s, e),
            None => eprintln!("{}", e),
        }
    }
}

/// Sets `stop` once `timeout` passes unless the returned sender is dropped
/// first.
fn watchdog(stop: Arc<AtomicBool>, timeout: Duration) -> mpsc::Sender<()> {
    let (tx, rx) = mpsc::channel::<()>();
    thread::spawn(move || {
        if let Err(mpsc::RecvTimeoutError::Timeout) = rx.recv_timeout(timeout) {
            stop.store(true, Ordering::Relaxed);
        }
    });
    tx
}

fn decisive(r: &Result<Outcome, EngineError>) -> bool {
    matches!(r, Ok(Outcome::Solved(_)) | Ok(Outcome::NoSolution))
}

/// Run `p` under `settings`. Solutions are checked against the constraints
/// once more before they are reported.
pub fn run(id: &str, p: &SynthProblem, settings: &Settings, trace: bool) -> Result<RunReport, EngineError> {
    let stop = Arc::new(AtomicBool::new(false));
    let limits = Limits {
        max_size: settings.max_size,
        stop: Some(stop.clone()),
        ..Limits::default()
    };
    let start = Instant::now();
    let guard = watchdog(stop.clone(), settings.timeout);
    let result = match settings.mode {
        Mode::Single(s) => {
            if trace {
                solve(p, s, &limits, &mut StderrTrace(None))
            } else {
                solve(p, s, &limits, &mut sygus_forge_core::engine::Silent)
            }
        }
        Mode::Portfolio => portfolio(p, &limits, &stop, trace),
    };
    drop(guard);
    let seconds = start.elapsed().as_secs_f64();
    let outcome = result?;
    let mut report = RunReport {
        problem: id.to_string(),
        strategy: settings.mode,
        status: Status::ResourceOut,
        seconds,
        size: None,
        iterations: 0,
        solution: None,
        resource: None,
    };
    match outcome {
        Outcome::Solved(sol) => {
            if find_counterexample(&sol.lambda, p).map_err(EngineError::Theory)?.is_some() {
                return Err(EngineError::Unverified);
            }
            report.status = Status::Solved;
            report.size = Some(sol.size);
            report.iterations = sol.iterations;
            report.solution = Some(sol);
        }
        Outcome::NoSolution => report.status = Status::NoSolution,
        Outcome::ResourceOut(r) => {
            report.resource = Some(if stop.load(Ordering::Relaxed) { Resource::Cancelled } else { r });
        }
    }
    Ok(report)
}

fn portfolio(p: &SynthProblem, limits: &Limits, stop: &Arc<AtomicBool>, trace: bool) -> Result<Outcome, EngineError> {
    let (tx, rx) = mpsc::channel();
    let mut handles = Vec::new();
    for s in [Strategy::Si, Strategy::Cegis] {
        let tx = tx.clone();
        let p = p.clone();
        let limits = limits.clone();
        let stop = stop.clone();
        handles.push(thread::spawn(move || {
            let r = if trace {
                solve(&p, s, &limits, &mut StderrTrace(Some(s)))
            } else {
                solve(&p, s, &limits, &mut sygus_forge_core::engine::Silent)
            };
            if decisive(&r) {
                stop.store(true, Ordering::Relaxed);
            }
            let _ = tx.send((s, r));
        }));
    }
    drop(tx);
    let mut results: Vec<(Strategy, Result<Outcome, EngineError>)> = rx.iter().collect();
    for h in handles {
        let _ = h.join();
    }
    // si first among decisive answers that finished together.
    results.sort_by_key(|(s, r)| (!decisive(r), *s != Strategy::Si));
    let mut fallback = None;
    for (s, r) in results {
        match r {
            ok @ Ok(Outcome::Solved(_)) | ok @ Ok(Outcome::NoSolution) => return ok,
            Err(EngineError::NotSingleInvocation) if s == Strategy::Si => {}
            other => {
                if fallback.is_none() || matches!(fallback, Some(Err(_))) {
                    fallback = Some(other);
                }
            }
        }
    }
    fallback.unwrap_or(Err(EngineError::NotSingleInvocation))
}
