//! Deterministic movie-popularity mining.
//!
//! The pipeline runs in four stages: ingest plain-text movie lists into a
//! linked store, build the two analysis datasets from it, train and
//! cross-validate the C4.5 and PART classifiers, and correlate budgets with
//! earnings. Every stage is deterministic for a fixed input and seed; the
//! same command run twice produces byte-identical artifacts.

pub mod commands;
pub mod config;
pub mod corr;
pub mod dataset;
pub mod eval;
pub mod ingest;
pub mod learn;

pub use commands::run;
