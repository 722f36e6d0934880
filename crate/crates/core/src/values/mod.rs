//! Exact distance values, range sets and distance transforms.

mod psi;
mod range_set;
mod value;

pub use psi::{Germ, Piece, StepFunction};
pub use range_set::RangeSet;
pub use value::{v, Value};
