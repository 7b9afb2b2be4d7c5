//! File formats and the command-line front end for `exset-core`.

pub mod json;
pub mod output;
pub mod problem;
pub mod run;

pub use problem::{Mode, ProblemFile};
pub use run::{run, solve, Artifacts, Failure, Overrides};
