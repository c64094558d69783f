//! Exact evaluation and verification of differential invariants of the
//! Euclidean motion group acting on jets of scalar functions on `R^n`.

pub mod equations;
pub mod error;
pub mod jetspace;
pub mod forms;
pub mod frames;
pub mod harness;
pub mod invariants;
pub mod linalg;
pub mod motion;
pub mod sampling;
pub mod scalar;
pub mod syzygy;

pub use error::{Error, Result};
