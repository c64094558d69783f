//! Multi-indices, jet points, pure jets and expressions in jet variables.

pub mod expr;
pub mod jet;
pub mod multi_index;
pub mod polynomial;
pub mod tensor;

pub use expr::{JetExpr, JetVar, Tape};
pub use jet::{jet_of_polynomial, polynomial_jet, symbolic_jet, Jet, JetPoint};
pub use multi_index::{binomial, count_of_degree, count_up_to, MultiIndex};
pub use polynomial::Polynomial;
pub use tensor::{DenseTensor, SymTensor};
