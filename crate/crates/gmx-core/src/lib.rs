//! Graphical models for binary linear block codes.
//!
//! The crate covers GF(2) algebra ([`gf2`]), normal realizations
//! ([`model`]) and their file format ([`gmf`]), the basic structural
//! transformations ([`transform`]), short-cycle counting ([`cycles`]),
//! complexity bounds ([`bounds`]), extraction heuristics ([`extract`]),
//! sum-product decoding ([`decode`]) and BER simulation ([`sim`]).

pub mod bounds;
pub mod canon;
pub mod cycles;
pub mod decode;
pub mod error;
pub mod extract;
pub mod fixtures;
pub mod gf2;
pub mod gmf;
pub mod model;
pub mod random;
pub mod report;
pub mod sim;
pub mod transform;

pub use error::{Error, Result};
pub use gf2::{BinaryMatrix, GeneralizedExtension, LinearCode};
pub use model::{ConstraintId, GraphicalModel, Port};
