//! Problem files, outcome documents, traces, experiments and the `gameopt`
//! command line.

// `!(x > 0.0)` is how argument checks reject NaN alongside bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod experiments;
pub mod file;
pub mod outcome;
pub mod run;
pub mod trace;

pub use file::{emit_problem, parse_problem_file, FileError, ProblemFile};
pub use outcome::OutcomeDocument;
