//! Front end for `g2forge-core`: instance configs, the verification suite,
//! single computations, parameter scans and flow runs.

pub mod checks;
pub mod compute;
pub mod config;
pub mod error;
pub mod flow;
pub mod json;
pub mod scan;

pub use error::{CliError, Result};
