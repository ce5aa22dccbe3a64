use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Named block kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    Decimation,
    Majority,
}

impl KernelId {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelId::Decimation => "decimation",
            KernelId::Majority => "majority",
        }
    }

    pub fn kernel<S: Scalar>(self) -> BlockKernel<S> {
        match self {
            KernelId::Decimation => BlockKernel::decimation(),
            KernelId::Majority => BlockKernel::majority(),
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decimation" => Ok(KernelId::Decimation),
            "majority" => Ok(KernelId::Majority),
            _ => Err(Error::InvalidParameter("kernel must be decimation or majority")),
        }
    }
}

#[inline]
fn spin_bit(s: i8) -> usize {
    usize::from(s < 0)
}

/// Single-block kernel `k(σ₀, σ₁; s₀)`.
///
/// Entry `i` of the table holds the value at `σ₀ = (-1)^{i&1}`,
/// `σ₁ = (-1)^{(i>>1)&1}`, `s₀ = (-1)^{(i>>2)&1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockKernel<S> {
    table: [S; 8],
}

impl<S: Scalar> BlockKernel<S> {
    /// Validates non-negativity and `Σ_{s₀} k = 1`.
    pub fn new(table: [S; 8]) -> Result<Self> {
        for v in &table {
            if v.lower() < 0.0 {
                return Err(Error::InvalidParameter("kernel entries must be non-negative"));
            }
        }
        for i in 0..4 {
            let total = table[i] + table[i + 4];
            if !(total.lower() <= 1.0 + 1e-12 && total.upper() >= 1.0 - 1e-12) {
                return Err(Error::KernelNotNormalized(total.mid()));
            }
        }
        Ok(BlockKernel { table })
    }

    pub fn from_fn(f: impl Fn(i8, i8, i8) -> S) -> Result<Self> {
        let table = core::array::from_fn(|i| {
            let sp = |b: usize| if (i >> b) & 1 == 0 { 1 } else { -1 };
            f(sp(0), sp(1), sp(2))
        });
        Self::new(table)
    }

    /// `½ + ½ s₀ σ₁`: the block spin copies the second spin of the block.
    pub fn decimation() -> Self {
        Self::from_fn(|_, s1, b| if s1 == b { S::one() } else { S::zero() })
            .expect("decimation kernel is normalized")
    }

    /// `½ + ¼ s₀ (σ₀ + σ₁)`; ties split evenly.
    pub fn majority() -> Self {
        let half = S::from_f64(0.5);
        Self::from_fn(|s0, s1, b| match (s0 as i32 + s1 as i32) * b as i32 {
            2 => S::one(),
            -2 => S::zero(),
            _ => half,
        })
        .expect("majority kernel is normalized")
    }

    /// `k ≡ ½`, independent of the original spins.
    pub fn uniform() -> Self {
        Self::from_fn(|_, _, _| S::from_f64(0.5)).expect("uniform kernel is normalized")
    }

    pub fn get(&self, s0: i8, s1: i8, block: i8) -> S {
        self.table[spin_bit(s0) | spin_bit(s1) << 1 | spin_bit(block) << 2]
    }

    /// Entry by configuration bits (bit `1` means spin `-1`).
    #[inline]
    pub fn by_bits(&self, b01: usize, block_bit: usize) -> S {
        self.table[b01 | block_bit << 2]
    }

    pub fn table(&self) -> &[S; 8] {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimation_entries() {
        let k = BlockKernel::<f64>::decimation();
        assert_eq!(k.get(1, 1, 1), 1.0);
        assert_eq!(k.get(1, -1, 1), 0.0);
        assert_eq!(k.get(-1, -1, -1), 1.0);
    }

    #[test]
    fn majority_entries() {
        let k = BlockKernel::<f64>::majority();
        assert_eq!(k.get(1, 1, 1), 1.0);
        assert_eq!(k.get(1, -1, 1), 0.5);
        assert_eq!(k.get(1, -1, -1), 0.5);
        assert_eq!(k.get(-1, -1, 1), 0.0);
    }

    #[test]
    fn kernels_are_normalized() {
        for k in [
            BlockKernel::<f64>::decimation(),
            BlockKernel::majority(),
            BlockKernel::uniform(),
        ] {
            for s0 in [1, -1] {
                for s1 in [1, -1] {
                    assert_eq!(k.get(s0, s1, 1) + k.get(s0, s1, -1), 1.0);
                }
            }
        }
    }

    #[test]
    fn unnormalized_table_is_rejected() {
        assert!(matches!(
            BlockKernel::<f64>::new([0.25; 8]),
            Err(Error::KernelNotNormalized(_))
        ));
        assert!(BlockKernel::<f64>::new([1.5, 0.5, 0.5, 0.5, -0.5, 0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn kernel_ids_parse() {
        assert_eq!("majority".parse::<KernelId>().unwrap(), KernelId::Majority);
        assert!("mode".parse::<KernelId>().is_err());
    }
}
