use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("support of {found} sites exceeds the cap of {cap} sites")]
    SupportCap { found: usize, cap: usize },

    #[error("site {site} is outside the window [{lo}, {hi}]")]
    Window { site: i32, lo: i32, hi: i32 },

    #[error("invalid site set: {0}")]
    InvalidSiteSet(&'static str),

    #[error("term key violates its role: {0}")]
    InvalidKey(&'static str),

    #[error("no spin value assigned to {lattice} site {site}")]
    MissingSite { lattice: &'static str, site: i32 },

    #[error("spin value {0} is not +1 or -1")]
    InvalidSpin(i8),

    #[error("value array has length {found}, expected {expected}")]
    LengthMismatch { found: usize, expected: usize },

    #[error("block sum is not positive on some configuration")]
    NonPositiveBlockSum,

    #[error("kernel is not normalized: sum over block spin is {0}")]
    KernelNotNormalized(f64),

    #[error("argument {value} is outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("iteration diverged: residual grew for {0} consecutive steps")]
    Divergence(usize),

    #[error("exact enumeration over {sites} sites exceeds the cap of {cap}")]
    EnumerationCap { sites: usize, cap: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
