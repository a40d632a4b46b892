//! Command-line harness for distributed clipped gradient descent over
//! time-varying mixing graphs.
//!
//! The binary front-end (`hclip-dgd`) wires five subcommands around
//! `hclip-core`:
//!
//! - `run`: execute the configured experiment for a range of seeds and write
//!   one telemetry CSV (plus a `key=value` meta sidecar) per run, with an
//!   ensemble quantile summary once at least ten seeds are present;
//! - `verify`: re-run a certified bound (mixing contraction, consensus
//!   contraction, clipping-error moments, gradient growth) or the schedule
//!   admissibility clauses, and exit nonzero on violations;
//! - `plotdata`: reduce finished runs to two-column `t,value` series at
//!   chosen quantiles, optionally rendering a dependency-free SVG chart;
//! - `suggest-params`: search for a step/clip schedule satisfying every
//!   admissibility clause of the configured instance;
//! - `validate-graph`: check the mixing-matrix schedule (weight floor,
//!   double stochasticity, window connectivity) and sample its contraction
//!   bound.
//!
//! Everything is deterministic given the config and seeds: rerunning any
//! command with any `--jobs` value reproduces output files byte for byte
//! (meta sidecars exclude their wall-time line from that guarantee).

pub mod args;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod svg;
