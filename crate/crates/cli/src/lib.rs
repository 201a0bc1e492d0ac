//! Command-line front end for `proxreg`: projections, invariant checks, curve solves and
//! reproductions of the worked examples, each emitted as an [`report::ExperimentReport`].

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;
