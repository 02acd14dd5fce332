//! File formats, the checking pipeline, reports and benchmarks on top of
//! [`exactreach_core`].

pub mod bench;
pub mod families;
pub mod format;
pub mod pipeline;
pub mod report;

pub use format::{parse_model, serialize, Model, ParseError};
pub use pipeline::{check, run, ExactResult, RunError, RunOptions, StartBasis, Status, Timings};
