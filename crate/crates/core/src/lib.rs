//! Numerical core for the first block-spin renormalization step of a
//! one-dimensional Ising chain with `|i-j|^{-α}` couplings.
//!
//! Everything here is `no_std` with `alloc`; file formats, the CLI and
//! threading live in the companion `rgstep` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod certify;
pub mod error;
pub mod fixed_point;
pub mod lro;
pub mod scalar;
pub mod rg_map;
pub mod spin_algebra;

pub use error::{Error, Result};
pub use scalar::{Interval, Mode, Scalar};
