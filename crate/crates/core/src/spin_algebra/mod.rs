//! Multilinear functions of original spins `σ` and block spins `s`.

pub mod poly;
pub mod sites;
pub mod transform;

pub use poly::{AlgebraConfig, NormWeights, SpinPolynomial, DEFAULT_MAX_SUPPORT, DEFAULT_PRUNE_TOL};
pub use sites::{Lattice, LocalSupport, Role, SiteSet, TermKey, Windows};
pub use transform::{coefficients_from_value_table, fwht, values_from_coefficients};
