//! Reader and printer for SyGuS problems over linear integer arithmetic,
//! a runner with timeouts and a portfolio mode, and the max-of-n benchmark
//! harness behind the `sygus-forge` binary.

pub mod bench;
pub mod gen;
pub mod parse;
pub mod print;
pub mod run;

pub use gen::gen_max_n;
pub use parse::{parse, ParseError, Pos};
pub use print::{print_problem, print_solution};
pub use run::{run, Mode, RunReport, Settings, Status};
