use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use sygus_forge::bench::{bench, csv, parse_range, table};
use sygus_forge::{parse, print_solution, run, Mode, Settings, Status};
use sygus_forge_core::engine::EngineError;
use sygus_forge_core::Strategy;

/// Syntax-guided synthesis for linear integer arithmetic.
#[derive(Parser, Debug)]
#[command(name = "sygus-forge", version)]
struct Cli {
    /// Problem file.
    #[arg(required_unless_present = "bench")]
    file: Option<PathBuf>,
    /// auto, si, si-r, cegis or portfolio; a comma-separated list with --bench.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Mode>,
    /// Wall-clock limit per run, in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Largest candidate size enumerative search considers.
    #[arg(long, default_value_t = 8)]
    max_size: usize,
    /// Print one line per iteration to stderr.
    #[arg(long)]
    trace: bool,
    /// Run the max-of-n benchmarks, e.g. max:2..5.
    #[arg(long, value_name = "max:LO..HI", conflicts_with = "file")]
    bench: Option<String>,
    /// With --bench, also write the results as CSV to this file.
    #[arg(long, requires = "bench")]
    csv: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if !(cli.timeout.is_finite() && cli.timeout > 0.0) {
        eprintln!("error: --timeout must be a positive number of seconds");
        return ExitCode::from(EXIT_USAGE);
    }
    let timeout = Duration::from_secs_f64(cli.timeout);
    match &cli.bench {
        Some(spec) => run_bench(&cli, spec, timeout),
        None => run_file(&cli, timeout),
    }
}

fn run_bench(cli: &Cli, spec: &str, timeout: Duration) -> ExitCode {
    let ns = match parse_range(spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let modes = if cli.strategy.is_empty() {
        vec![Mode::Single(Strategy::Si), Mode::Single(Strategy::SiR), Mode::Single(Strategy::Cegis)]
    } else {
        cli.strategy.clone()
    };
    let reports = match bench(ns.clone(), &modes, timeout, cli.max_size) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    print!("{}", table(ns, &modes, &reports));
    if let Some(path) = &cli.csv {
        if let Err(e) = std::fs::write(path, csv(&reports)) {
            eprintln!("error: {}: {}", path.display(), e);
            return ExitCode::from(EXIT_USAGE);
        }
    }
    ExitCode::SUCCESS
}

fn run_file(cli: &Cli, timeout: Duration) -> ExitCode {
    let path = cli.file.as_ref().expect("clap requires a file without --bench");
    let mode = match cli.strategy.as_slice() {
        [] => Mode::Single(Strategy::Auto),
        [m] => *m,
        _ => {
            eprintln!("error: give one --strategy when solving a file");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {}", path.display(), e);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let p = match parse(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}:{}", path.display(), e);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let settings = Settings {
        mode,
        timeout,
        max_size: cli.max_size,
    };
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let report = match run(&id, &p, &settings, cli.trace) {
        Ok(r) => r,
        Err(e @ (EngineError::Problem(_) | EngineError::Grammar(_) | EngineError::NotSingleInvocation)) => {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    match report.status {
        Status::Solved => {
            let sol = report.solution.as_ref().expect("solved reports carry a solution");
            println!("{}", print_solution(&p, &sol.lambda));
            if !sol.grammar_checked {
                eprintln!("note: the solution was not checked against the grammar");
            }
            ExitCode::SUCCESS
        }
        Status::NoSolution => {
            println!("(fail)");
            ExitCode::from(1)
        }
        Status::ResourceOut => {
            let why = report.resource.map(|r| r.to_string()).unwrap_or_default();
            eprintln!("resource-out: {}", why);
            ExitCode::from(2)
        }
    }
}
