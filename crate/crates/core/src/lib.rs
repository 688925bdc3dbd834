//! Random Dirichlet series with prescribed coefficient covariance, their
//! Gaussian analytic limits near the critical line, zero counting and the
//! statistical checks that tie the two together.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeff_models;
pub mod csv_out;
pub mod error;
pub mod limit_gaf;
pub mod runner;
pub mod series_eval;
pub mod special;
pub mod stats_harness;
pub mod synthesis;
pub mod zero_finder;

pub use error::{Error, Result};
