//! Command line, file formats and verification harness for
//! [`elastica_core`].
//!
//! * [`config`] reads run configurations.
//! * [`spectrum_io`] and [`matrix_market`] read and write spectra and
//!   matrices.
//! * [`harness`] runs solves, cap computations and bound evaluations.
//! * [`report`] holds verification reports and renders them as CSV, text
//!   tables and SVG charts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod harness;
pub mod matrix_market;
pub mod report;
pub mod spectrum_io;

pub use elastica_core as core;

pub use config::{Mode, OutputFormat, Policy, RunConfig};
pub use error::HarnessError;
pub use harness::{run, run_bounds, run_cap, run_report, run_solve, run_verify, Rendered};
pub use report::{Summary, VerificationReport};
