//! Analysis pipeline for children's touch and stylus interaction tests:
//! session ingestion, per-test feature extraction, feature-subset search,
//! age-group classification, and the single-/multi-test evaluation protocol
//! with its statistical significance analysis.
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `childci` binary wraps the same pipeline behind subcommands.

pub mod error;
pub mod features;
pub mod ingest;
pub mod model;
pub mod signal;

pub use error::{Error, Result};
pub mod cli;
