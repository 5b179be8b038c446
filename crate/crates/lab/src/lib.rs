//! Analysis tooling around the MV3 cipher: walk graphs and their spectra,
//! random-walk experiments, sequencing-relation search, closed-form attack
//! bounds and keystream statistics.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod error;
pub mod graph;
pub mod perf;
pub mod sequencing;
pub mod spectrum;
pub mod stats;
pub mod walk;

pub use error::{LabError, Result};
