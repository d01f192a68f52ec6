//! Column type inference for delimited text files.
//!
//! Each column is scored under probabilistic finite-state machines for
//! dates, floats, integers and strings, with per-row missing and anomaly
//! alternatives. A logistic classifier over posterior and cardinality
//! features then decides whether integer or string columns are categorical,
//! and the rows labelled clean give the categorical values.

pub mod arff;
pub mod baselines;
pub mod categorical;
pub mod corpus;
pub mod cv;
pub mod error;
pub mod evaluate;
pub mod inference;
pub mod ingest;
pub mod machines;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod train;
pub mod types;
pub mod values;

pub use error::{Error, Result};
