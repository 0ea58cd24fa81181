//! Max-of-n timing tables.

use std::fmt::Write;
use std::ops::RangeInclusive;
use std::time::Duration;

use sygus_forge_core::engine::EngineError;

use crate::gen::gen_max_n;
use crate::parse::parse;
use crate::run::{run, Mode, RunReport, Settings, Status};

/// Parse `max:<lo>..<hi>`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let rest = s
        .strip_prefix("max:")
        .ok_or_else(|| format!("expected max:<lo>..<hi>, got '{}'", s))?;
    let (lo, hi) = rest
        .split_once("..")
        .ok_or_else(|| format!("expected max:<lo>..<hi>, got '{}'", s))?;
    let lo: usize = lo.parse().map_err(|_| format!("bad lower bound '{}'", lo))?;
    let hi: usize = hi.parse().map_err(|_| format!("bad upper bound '{}'", hi))?;
    if lo < 2 || hi < lo {
        return Err(format!("need 2 <= lo <= hi, got {}..{}", lo, hi));
    }
    Ok(lo..=hi)
}

/// Every strategy on every max-of-n in `ns`, strategy-major.
pub fn bench(
    ns: RangeInclusive<usize>,
    strategies: &[Mode],
    timeout: Duration,
    max_size: usize,
) -> Result<Vec<RunReport>, EngineError> {
    let mut out = Vec::new();
    for &mode in strategies {
        for n in ns.clone() {
            let p = parse(&gen_max_n(n)).expect("generated benchmarks parse");
            let settings = Settings { mode, timeout, max_size };
            out.push(run(&format!("max{}", n), &p, &settings, false)?);
        }
    }
    Ok(out)
}

fn cell(r: &RunReport) -> String {
    match r.status {
        Status::Solved => format!("{:.2}", r.seconds),
        Status::NoSolution => "fail".to_string(),
        Status::ResourceOut => "--".to_string(),
    }
}

/// One row per strategy, one column per n.
pub fn table(ns: RangeInclusive<usize>, strategies: &[Mode], reports: &[RunReport]) -> String {
    let mut out = String::new();
    if strategies.is_empty() {
        return out;
    }
    let _ = write!(out, "{:<10}", "strategy");
    for n in ns.clone() {
        let _ = write!(out, "{:>9}", format!("n={}", n));
    }
    out.push('\n');
    for mode in strategies {
        let _ = write!(out, "{:<10}", mode.to_string());
        for n in ns.clone() {
            let id = format!("max{}", n);
            let c = reports
                .iter()
                .find(|r| r.strategy == *mode && r.problem == id)
                .map(cell)
                .unwrap_or_else(|| "--".to_string());
            let _ = write!(out, "{:>9}", c);
        }
        out.push('\n');
    }
    out
}

/// Comma-separated companion of [`table`].
pub fn csv(reports: &[RunReport]) -> String {
    let mut out = String::from("n,strategy,outcome,seconds,size\n");
    for r in reports {
        let n = r.problem.trim_start_matches("max");
        let size = r.size.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{:.6},{}", n, r.strategy, r.status, r.seconds, size);
    }
    out
}
