//! Sums of practical numbers and polygonal numbers.
//!
//! * [`decompose::decompose_practical_triangular`] writes every natural number
//!   as a practical number plus a triangular number, with a checkable witness.
//! * [`decompose`] also carries the congruence machinery for practical plus
//!   two s-gonal numbers, and a search-mode version of that construction.
//! * [`survey`] runs exhaustive representability censuses with word-level
//!   bitset kernels.

pub mod arith;
pub mod bits;
pub mod cli;
pub mod decompose;
mod error;
pub mod polygonal;
pub mod practical;
pub mod survey;

pub use error::{Error, Result};
