use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// The two one-dimensional lattices: original spins `σ_i` and block spins `s_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lattice {
    Original,
    Block,
}

impl Lattice {
    pub fn name(self) -> &'static str {
        match self {
            Lattice::Original => "original",
            Lattice::Block => "block",
        }
    }
}

/// A finite set of lattice sites, stored strictly increasing.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteSet(Vec<i32>);

impl SiteSet {
    pub const fn empty() -> Self {
        SiteSet(Vec::new())
    }

    /// Builds a set from sites in any order; duplicates are rejected.
    pub fn new(sites: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut v: Vec<i32> = sites.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSiteSet("duplicate site"));
        }
        Ok(SiteSet(v))
    }

    /// Caller guarantees `sites` is strictly increasing.
    pub(crate) fn from_sorted(sites: Vec<i32>) -> Self {
        debug_assert!(sites.windows(2).all(|w| w[0] < w[1]));
        SiteSet(sites)
    }

    pub fn singleton(site: i32) -> Self {
        SiteSet(alloc::vec![site])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sites(&self) -> &[i32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, site: i32) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    pub fn first(&self) -> Option<i32> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<i32> {
        self.0.last().copied()
    }

    /// `{i + k : i ∈ self}`
    pub fn shifted(&self, k: i32) -> Self {
        SiteSet(self.0.iter().map(|&i| i + k).collect())
    }

    pub fn symmetric_difference(&self, other: &SiteSet) -> SiteSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        SiteSet(out)
    }

    /// Sites of `self` that are not in `other`.
    pub fn difference(&self, other: &SiteSet) -> SiteSet {
        SiteSet(self.0.iter().copied().filter(|s| !other.contains(*s)).collect())
    }

    pub fn intersection(&self, other: &SiteSet) -> SiteSet {
        SiteSet(self.0.iter().copied().filter(|s| other.contains(*s)).collect())
    }

    /// True when every site is `>= bound` (vacuous for the empty set).
    pub fn all_at_least(&self, bound: i32) -> bool {
        self.first().is_none_or(|m| m >= bound)
    }

    /// True when every site is `<= bound`.
    pub fn all_at_most(&self, bound: i32) -> bool {
        self.last().is_none_or(|m| m <= bound)
    }

    /// True when every site is `< bound`.
    pub fn all_below(&self, bound: i32) -> bool {
        self.last().is_none_or(|m| m < bound)
    }

    /// Membership in the boundary class: non-negative and meeting `{0, 1}`.
    pub fn in_boundary_class(&self) -> bool {
        self.all_at_least(0) && (self.contains(0) || self.contains(1))
    }
}

impl fmt::Debug for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

impl<const N: usize> TryFrom<[i32; N]> for SiteSet {
    type Error = Error;
    fn try_from(v: [i32; N]) -> Result<Self> {
        SiteSet::new(v)
    }
}

/// Key of one coefficient: original-lattice set `X` and block-lattice set `Y`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub x: SiteSet,
    pub y: SiteSet,
}

impl TermKey {
    pub fn new(x: SiteSet, y: SiteSet) -> Self {
        TermKey { x, y }
    }

    pub fn constant() -> Self {
        TermKey::default()
    }

    pub fn is_constant(&self) -> bool {
        self.x.is_empty() && self.y.is_empty()
    }
}

/// Inclusive window of admissible sites on each lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Windows {
    pub sigma: (i32, i32),
    pub block: (i32, i32),
}

impl Windows {
    pub const UNBOUNDED: Windows = Windows {
        sigma: (i32::MIN, i32::MAX),
        block: (i32::MIN, i32::MAX),
    };

    pub fn check(&self, key: &TermKey) -> Result<()> {
        for s in key.x.iter() {
            if s < self.sigma.0 || s > self.sigma.1 {
                return Err(Error::Window {
                    site: s,
                    lo: self.sigma.0,
                    hi: self.sigma.1,
                });
            }
        }
        for s in key.y.iter() {
            if s < self.block.0 || s > self.block.1 {
                return Err(Error::Window {
                    site: s,
                    lo: self.block.0,
                    hi: self.block.1,
                });
            }
        }
        Ok(())
    }
}

impl Default for Windows {
    fn default() -> Self {
        Windows::UNBOUNDED
    }
}

/// Role a polynomial plays, which fixes the admissible keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Any finite `X`, `Y`.
    Free,
    /// Boundary coefficients `c(X, Y)`: `X` in the boundary class, `Y < 0`.
    Boundary,
    /// Output of summing out block 0: `V ≥ 2` (or empty), `W ≤ 0`.
    SumOut,
}

impl Role {
    pub fn check(self, key: &TermKey) -> Result<()> {
        match self {
            Role::Free => Ok(()),
            Role::Boundary => {
                if !key.x.in_boundary_class() {
                    return Err(Error::InvalidKey("X must be non-negative and meet {0,1}"));
                }
                if !key.y.all_below(0) {
                    return Err(Error::InvalidKey("Y must lie strictly left of block 0"));
                }
                Ok(())
            }
            Role::SumOut => {
                if !key.x.all_at_least(2) {
                    return Err(Error::InvalidKey("V must satisfy V >= 2"));
                }
                if !key.y.all_at_most(0) {
                    return Err(Error::InvalidKey("W must satisfy W <= 0"));
                }
                Ok(())
            }
        }
    }
}

/// An ordered list of sites on both lattices; bit `i` of a mask is the
/// `i`-th original site, bit `sigma.len() + j` the `j`-th block site.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalSupport {
    sigma: Vec<i32>,
    block: Vec<i32>,
}

impl LocalSupport {
    /// Sites need not be sorted; their order defines the bit layout.
    pub fn new(sigma: Vec<i32>, block: Vec<i32>) -> Result<Self> {
        for v in [&sigma, &block] {
            let mut s = v.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSiteSet("duplicate site in support"));
            }
        }
        if sigma.len() + block.len() > 63 {
            return Err(Error::SupportCap {
                found: sigma.len() + block.len(),
                cap: 63,
            });
        }
        Ok(LocalSupport { sigma, block })
    }

    pub fn sigma_sites(&self) -> &[i32] {
        &self.sigma
    }

    pub fn block_sites(&self) -> &[i32] {
        &self.block
    }

    pub fn len(&self) -> usize {
        self.sigma.len() + self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of spin configurations, `2^len`.
    pub fn configurations(&self) -> usize {
        1usize << self.len()
    }

    pub fn sigma_bit(&self, site: i32) -> Option<usize> {
        self.sigma.iter().position(|&s| s == site)
    }

    pub fn block_bit(&self, site: i32) -> Option<usize> {
        self.block
            .iter()
            .position(|&s| s == site)
            .map(|j| j + self.sigma.len())
    }

    pub fn mask_of(&self, key: &TermKey) -> Option<u64> {
        let mut m = 0u64;
        for s in key.x.iter() {
            m |= 1 << self.sigma_bit(s)?;
        }
        for s in key.y.iter() {
            m |= 1 << self.block_bit(s)?;
        }
        Some(m)
    }

    pub fn key_of(&self, mask: u64) -> TermKey {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &s) in self.sigma.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x.push(s);
            }
        }
        let off = self.sigma.len();
        for (j, &s) in self.block.iter().enumerate() {
            if mask >> (j + off) & 1 == 1 {
                y.push(s);
            }
        }
        x.sort_unstable();
        y.sort_unstable();
        TermKey::new(SiteSet::from_sorted(x), SiteSet::from_sorted(y))
    }

    /// Cardinalities `(|X|, |Y|)` of the key encoded by `mask`.
    pub fn split_popcount(&self, mask: u64) -> (usize, usize) {
        let n = self.sigma.len();
        let low = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        ((mask & low).count_ones() as usize, (mask >> n).count_ones() as usize)
    }
}
