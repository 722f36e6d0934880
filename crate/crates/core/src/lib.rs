//! Exact constructions on finite `S`-valued ultrametric spaces.
//!
//! Every distance is an exact non-negative rational ([`Value`]); range sets
//! ([`RangeSet`]) constrain which values may appear. On top of validated
//! finite spaces the crate builds amalgams, Lemin–Lemin embeddings into
//! ultra-normed free ℤ-modules, interpolating extensions with the `UD`
//! sandwich bound, lazily evaluated telescope spaces, and the doubling /
//! anti-doubling machinery.

pub mod amalgam;
pub mod cli;
pub mod embed;
pub mod error;
pub mod extend;
pub mod generic;
pub mod space;
pub mod telescope;
pub mod random;
pub mod values;

pub use error::{Error, Hypothesis, Result};
pub use space::{FiniteUltrametricSpace, Space, UdValue};
pub use values::{RangeSet, StepFunction, Value};
