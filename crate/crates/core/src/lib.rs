//! Analytics for data-converter surveys: figures of merit, budget cascades,
//! Pareto frontiers, scaling trends and requirement gap reports.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod config;
pub mod dataset;
pub mod error;
pub mod frontier;
pub mod gap;
pub mod metrics;
pub mod report;
pub mod trends;

pub use error::{Error, Result};
