//! Single-block machinery: kernels, the sum-out map, block expectations,
//! the contraction diagnostic and the renormalized Hamiltonian.

pub mod chain;
pub mod hamiltonian;
pub mod kernel;
pub mod sum_out;

pub use chain::ToyRing;
pub use hamiltonian::{
    coupling_tail_sum, hamiltonian_hat, hamiltonian_hat_range, long_range_norm,
    nearest_neighbor_hat, Couplings, HamiltonianHat, HamiltonianSpec,
};
pub use kernel::{BlockKernel, KernelId};
pub use sum_out::{
    block_expectation, block_expectations, block_sum_out, block_sum_out_at,
    contraction_diagnostic, rg_f, rho, rho_inverse, BlockSubset, Contraction, FTable,
    RenormalizedHamiltonian,
};
