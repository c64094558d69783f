//! Exact linear algebra over `Q` and a cyclic Jacobi eigensolver.

pub mod exact;
pub mod jacobi;

pub use exact::{det, inverse, nullspace, rank, solve};
pub use jacobi::{jacobi_eigen, Eigen};
