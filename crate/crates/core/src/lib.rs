//! Chance-constrained knapsack: instances, tail-bound surrogates for the
//! chance constraint, fitness models, variation operators, evolutionary
//! algorithms and an experiment harness.
//!
//! Item weights are independent and uniform on `[a_i − δ, a_i + δ]`. A
//! selection is feasible when its expected-weight total leaves the capacity
//! exceeded with probability at most `α`, as estimated by the configured
//! bound.

pub mod algorithms;
pub mod chance;
pub mod error;
pub mod fitness;
pub mod harness;
pub mod instances;
pub mod operators;
pub mod selection;

pub use chance::{Bound, ChanceSpec};
pub use error::{CckpError, Result};
pub use instances::{Family, GeneratorConfig, Instance};
pub use selection::Selection;
