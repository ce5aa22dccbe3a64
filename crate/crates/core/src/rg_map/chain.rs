//! A short periodic chain summed exactly, used to check that a block
//! transformation preserves the partition function.

use alloc::vec::Vec;

use super::kernel::BlockKernel;
use crate::error::{Error, Result};
use crate::spin_algebra::{AlgebraConfig, LocalSupport, SpinPolynomial};

/// Largest ring handled by exhaustive enumeration.
pub const MAX_RING_SPINS: usize = 20;

/// Periodic chain of `2·blocks` spins with nearest-neighbor coupling `γ`
/// and `ε d^{-α}` at ring distance `d ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyRing {
    pub blocks: usize,
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
}

impl ToyRing {
    pub fn new(blocks: usize, gamma: f64, eps: f64, alpha: f64) -> Result<Self> {
        if blocks < 2 {
            return Err(Error::InvalidParameter("ring needs at least two blocks"));
        }
        if 2 * blocks > MAX_RING_SPINS {
            return Err(Error::EnumerationCap {
                sites: 2 * blocks,
                cap: MAX_RING_SPINS,
            });
        }
        Ok(ToyRing {
            blocks,
            gamma,
            eps,
            alpha,
        })
    }

    pub fn spins(&self) -> usize {
        2 * self.blocks
    }

    fn pair_couplings(&self) -> Vec<(usize, usize, f64)> {
        let n = self.spins();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d = (j - i).min(n - (j - i));
                let k = if d == 1 {
                    self.gamma
                } else {
                    self.eps * libm::pow(d as f64, -self.alpha)
                };
                out.push((i, j, k));
            }
        }
        out
    }

    /// `-H(σ) = Σ_{i<j} K_{ij} σᵢσⱼ` for configuration bits `cfg`
    /// (bit `i` set means `σᵢ = -1`).
    fn minus_energy(&self, pairs: &[(usize, usize, f64)], cfg: usize) -> f64 {
        pairs
            .iter()
            .map(|&(i, j, k)| if (cfg >> i ^ cfg >> j) & 1 == 0 { k } else { -k })
            .sum()
    }

    /// `Σ_σ e^{-H(σ)}`.
    pub fn partition_function(&self) -> f64 {
        let pairs = self.pair_couplings();
        (0..1usize << self.spins())
            .map(|c| libm::exp(self.minus_energy(&pairs, c)))
            .sum()
    }

    /// `H′` defined by `e^{-H′(s)} = Σ_σ Π_i k(σ_{2i}, σ_{2i+1}; s_i) e^{-H(σ)}`,
    /// as a polynomial in the block spins `s_0 … s_{L-1}`.
    pub fn renormalized_hamiltonian(&self, kernel: &BlockKernel<f64>) -> Result<SpinPolynomial<f64>> {
        let pairs = self.pair_couplings();
        let weights: Vec<f64> = (0..1usize << self.spins())
            .map(|c| libm::exp(self.minus_energy(&pairs, c)))
            .collect();
        let nb = self.blocks;
        let mut values = Vec::with_capacity(1 << nb);
        for s in 0..1usize << nb {
            let mut total = 0.0;
            for (c, &wc) in weights.iter().enumerate() {
                let mut k = 1.0;
                for i in 0..nb {
                    k *= kernel.by_bits(c >> (2 * i) & 3, s >> i & 1);
                    if k == 0.0 {
                        break;
                    }
                }
                total += k * wc;
            }
            if total <= 0.0 {
                return Err(Error::NonPositiveBlockSum);
            }
            values.push(-libm::log(total));
        }
        let support = LocalSupport::new(Vec::new(), (0..nb as i32).collect())?;
        let cfg = AlgebraConfig::exact();
        SpinPolynomial::coefficients_from_values(values, &support, &cfg)
    }

    /// `Σ_s e^{-H′(s)}` evaluated from the coefficients of `H′`.
    pub fn renormalized_partition_function(&self, h: &SpinPolynomial<f64>) -> Result<f64> {
        let support = LocalSupport::new(Vec::new(), (0..self.blocks as i32).collect())?;
        Ok(h.values_on(&support)?.iter().map(|&v| libm::exp(-v)).sum())
    }
}
