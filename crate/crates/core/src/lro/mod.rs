//! Torus numerics for the long-range-order argument: periodic couplings, the
//! dispersion and its regularizer, exact-enumeration infrared and Gaussian
//! domination checks, and the integral representation of the couplings.

mod enumeration;
mod integral;
pub mod quadrature;
mod torus;

pub use enumeration::{
    gaussian_domination_check, infrared_check, log_partition_shifted, second_order_check,
    two_point, InfraredRow, SecondOrder, TwoPoint, DOMINATION_SLACK, ENUMERATION_CAP,
};
pub use integral::{integral_rep_check, moment_measure_check, QUADRATURE_TOL};
pub use torus::{
    dispersion_e, infrared_sum, lro_gamma_threshold, periodic_coupling, regularizer_comparison,
    regularizer_lower_constant, regularizer_sum, regularizer_sum_of, spectral_r, TorusCouplings,
    TorusModel, THRESHOLD_REL_TOL,
};
