//! Finite time-frequency analysis on the cyclic group Z_L.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod gabor;
pub mod generators;
pub mod operator;
pub mod quantize;
pub mod scenario;
pub mod seq;
pub mod signal;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use gabor::LatticeSpec;
pub use operator::{Operator, Provenance};
pub use quantize::SymbolGrid;
pub use seq::WeightSpec;
pub use signal::{Signal, TfPoint};
