//! Simulation of the triangle-free random graph process.
//!
//! The process starts from the empty graph on `n` vertices and repeatedly
//! inserts a pair chosen uniformly at random among the *open* pairs: non-edges
//! whose insertion keeps the graph triangle-free. The crate keeps the exact
//! Edge/Open/Closed status of every pair, compares the observed open-pair count
//! and partial-vertex counts against their deterministic trajectories, and
//! monitors whether fixed triangle-free patterns appear or get blocked.
//!
//! * [`process`] owns the evolving state and the step rule.
//! * [`trajectory`] evaluates the closed-form trajectories and envelopes.
//! * [`pattern`] loads patterns, searches for copies and measures blocking.
//! * [`harness`] drives runs, sweeps and audits and writes result files.

pub mod graph;
pub mod harness;
pub mod open_set;
pub mod pattern;
pub mod process;
pub mod trajectory;

pub use graph::{GraphView, Pair, SimpleGraph};
pub use process::{
    PairStatus, ProcessConfig, ProcessError, ProcessState, RunOutcome, StepResult, StopCondition,
    VertexClass,
};
