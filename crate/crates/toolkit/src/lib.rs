//! Std companion to `agraph-core`: access-log preprocessing, a synthetic
//! basket generator, the benchmark harness, output formats and the `agraph`
//! command line.

pub mod bench;
pub mod cli;
pub mod memory;
pub mod output;
pub mod pipeline;
pub mod synth;
pub mod weblog;
