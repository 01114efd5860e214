//! GF(2) linear algebra: bit matrices, labeled linear codes, alist I/O and
//! cyclic-code polynomials.

pub mod alist;
pub mod code;
pub mod matrix;
pub mod poly;

pub use code::{GeneralizedExtension, LinearCode};
pub use matrix::{BinaryMatrix, Systematic};
