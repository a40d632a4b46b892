//! Distributed clipped stochastic gradient descent over time-varying graphs.
//!
//! Agents minimize the average of local smooth objectives by alternating
//! doubly stochastic gossip with clipped stochastic gradient steps, under
//! gradient noise so heavy-tailed that only a p-th moment (`p` in (1, 2])
//! is finite. The crate provides:
//!
//! - [`graph`]: time-varying mixing schedules, generators, validity checks,
//!   and empirical verification of the geometric mixing bound;
//! - [`noise`]: heavy-tailed noise models with certified moment bounds;
//! - [`schedule`]: step-size/clip-level schedules, certified series
//!   constants, the admissibility checker, and parameter suggestion;
//! - [`objective`]: local least-squares objectives with an exact, cached
//!   global minimizer;
//! - [`engine`]: the simulation loop with full-resolution telemetry and
//!   reproducible per-(agent, step) noise substreams;
//! - [`analysis`]: certification of the consensus, gradient-growth, and
//!   clipping-error bounds on recorded runs, plus ensemble summaries.
//!
//! Heavy loops run data-parallel through [`exec`] when the `parallel`
//! feature (default) is enabled, and sequentially otherwise; outputs are
//! byte-identical either way.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod exec;
pub mod graph;
pub mod linalg;
pub mod noise;
pub mod objective;
pub mod schedule;
pub mod stream;

pub use error::{Error, Result};
