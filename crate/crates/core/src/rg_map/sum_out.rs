use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::kernel::BlockKernel;
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Scalar};
use crate::spin_algebra::{
    coefficients_from_value_table, AlgebraConfig, LocalSupport, NormWeights, Role, SiteSet,
    SpinPolynomial, TermKey,
};

/// A non-empty subset `A` of the block `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockSubset {
    First,
    Second,
    Both,
}

impl BlockSubset {
    pub const ALL: [BlockSubset; 3] = [BlockSubset::First, BlockSubset::Second, BlockSubset::Both];

    pub fn size(self) -> usize {
        match self {
            BlockSubset::Both => 2,
            _ => 1,
        }
    }

    pub fn sites(self) -> &'static [i32] {
        match self {
            BlockSubset::First => &[0],
            BlockSubset::Second => &[1],
            BlockSubset::Both => &[0, 1],
        }
    }

    /// Whether `σ(A) = -1` on the block configuration `b01`.
    #[inline]
    fn negative(self, b01: usize) -> bool {
        match self {
            BlockSubset::First => b01 & 1 == 1,
            BlockSubset::Second => b01 & 2 == 2,
            BlockSubset::Both => (b01 ^ (b01 >> 1)) & 1 == 1,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Bit layouts for one block sum: the full support puts `σ₀, σ₁` in bits
/// 0 and 1 so that a full configuration index is `(external << 2) | b01`;
/// block site 0 is always present.
struct BlockLayout {
    full: LocalSupport,
    external: LocalSupport,
}

impl BlockLayout {
    fn of<S: Scalar>(c: &SpinPolynomial<S>, cfg: &AlgebraConfig) -> Result<Self> {
        c.check_role(Role::Boundary)?;
        let mut sig = BTreeSet::new();
        let mut blk = BTreeSet::new();
        for (k, _) in c.terms() {
            sig.extend(k.x.iter().filter(|&s| s >= 2));
            blk.extend(k.y.iter());
        }
        let sig: Vec<i32> = sig.into_iter().collect();
        let mut block = alloc::vec![0];
        block.extend(blk);
        let n = sig.len() + block.len() + 2;
        if n > cfg.max_support {
            return Err(Error::SupportCap {
                found: n,
                cap: cfg.max_support,
            });
        }
        let mut full_sig = alloc::vec![0, 1];
        full_sig.extend(&sig);
        Ok(BlockLayout {
            full: LocalSupport::new(full_sig, block.clone())?,
            external: LocalSupport::new(sig, block)?,
        })
    }

    /// Bit of `s₀` in an external configuration index.
    fn block_zero_shift(&self) -> usize {
        self.external.sigma_sites().len()
    }
}

/// Values of `c` on every full configuration, with the kernel weights of
/// the four block configurations for each external configuration.
struct BlockValues<S> {
    layout: BlockLayout,
    values: Vec<S>,
}

impl<S: Scalar> BlockValues<S> {
    fn new(c: &SpinPolynomial<S>, cfg: &AlgebraConfig) -> Result<Self> {
        let layout = BlockLayout::of(c, cfg)?;
        let values = c.values_on(&layout.full)?;
        Ok(BlockValues { layout, values })
    }

    fn external_count(&self) -> usize {
        self.layout.external.configurations()
    }

    /// `(k(b01; s₀), c(b01, e))` for the four block configurations.
    #[inline]
    fn block(&self, kernel: &BlockKernel<S>, e: usize) -> ([S; 4], [S; 4]) {
        let sb = (e >> self.layout.block_zero_shift()) & 1;
        let w = core::array::from_fn(|b| kernel.by_bits(b, sb));
        let v = core::array::from_fn(|b| self.values[e << 2 | b]);
        (w, v)
    }
}

/// `f(c, V, W)`: coefficients of `ln Σ_{σ₀σ₁} k(σ₀,σ₁;s₀) e^{c}` with
/// `V ≥ 2`, `W ≤ 0`. The `(∅, ∅)` coefficient is held apart as the free
/// energy per block.
#[derive(Debug, Clone)]
pub struct FTable<S> {
    terms: SpinPolynomial<S>,
    constant: S,
}

impl<S: Scalar> FTable<S> {
    /// Non-constant entries.
    pub fn terms(&self) -> &SpinPolynomial<S> {
        &self.terms
    }

    pub fn constant(&self) -> S {
        self.constant
    }

    /// Upper bound on the weighted norm of pruned entries.
    pub fn pruned_mass(&self) -> f64 {
        self.terms.pruned_mass()
    }

    /// All entries including the constant.
    pub fn to_polynomial(&self) -> SpinPolynomial<S> {
        let mut p = self.terms.clone();
        p.add_term(TermKey::constant(), self.constant);
        p
    }

    /// The shift-summed map `F`: each entry `(V, W)` with `V ≠ ∅` lands on
    /// `(V - 2k, W - k)` for the unique `k ≥ 1` with `min(V) - 2k ∈ {0, 1}`.
    pub fn boundary_map(&self) -> SpinPolynomial<S> {
        let mut out = SpinPolynomial::zero();
        for (key, &v) in self.terms.terms() {
            let Some(lo) = key.x.first() else { continue };
            let k = lo.div_euclid(2);
            out.add_term(TermKey::new(key.x.shifted(-2 * k), key.y.shifted(-k)), v);
        }
        out.set_pruned_mass(self.pruned_mass());
        out
    }

    /// Entries with `V = ∅`, grouped by block-lattice translation class.
    pub fn renormalized_hamiltonian(&self) -> RenormalizedHamiltonian<S> {
        let mut classes: BTreeMap<SiteSet, S> = BTreeMap::new();
        for (key, &v) in self.terms.terms() {
            if !key.x.is_empty() {
                continue;
            }
            let Some(top) = key.y.last() else { continue };
            classes
                .entry(key.y.shifted(-top))
                .and_modify(|e| *e += v)
                .or_insert(v);
        }
        classes.retain(|_, v| !v.is_zero());
        RenormalizedHamiltonian {
            classes,
            free_energy: self.constant,
        }
    }

    fn shifted(&self, dsigma: i32, dblock: i32) -> Result<Self> {
        Ok(FTable {
            terms: self.terms.shift(dsigma, dblock)?,
            constant: self.constant,
        })
    }
}

/// Block-spin couplings `h′(W)` over translation classes represented with
/// `max(W) = 0`, plus the free energy per block.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizedHamiltonian<S> {
    pub classes: BTreeMap<SiteSet, S>,
    pub free_energy: S,
}

impl<S: Scalar> RenormalizedHamiltonian<S> {
    pub fn empty() -> Self {
        RenormalizedHamiltonian {
            classes: BTreeMap::new(),
            free_energy: S::zero(),
        }
    }

    pub fn get(&self, class: &[i32]) -> S {
        SiteSet::new(class.iter().copied())
            .ok()
            .and_then(|w| self.classes.get(&w).copied())
            .unwrap_or_else(S::zero)
    }

    /// `Σ_{W ∋ 0} |h′(W)|`: each class contributes once per site, so this is
    /// `Σ_classes |h′(W)| |W|`.
    pub fn single_flip_norm(&self) -> S {
        let parts: Vec<S> = self
            .classes
            .iter()
            .map(|(w, &v)| v.abs() * S::from_f64(w.len() as f64))
            .collect();
        pairwise_sum(&parts)
    }

    /// `Σ_classes |h′(W)| e^{ν|W|}`.
    pub fn weighted_norm(&self, nu: f64) -> S {
        let parts: Vec<S> = self
            .classes
            .iter()
            .map(|(w, &v)| v.abs() * (S::from_f64(nu) * S::from_f64(w.len() as f64)).exp())
            .collect();
        pairwise_sum(&parts)
    }

    /// The classes as a polynomial in block spins with keys `(∅, W)`.
    pub fn to_polynomial(&self) -> SpinPolynomial<S> {
        let mut p = SpinPolynomial::zero();
        for (w, &v) in &self.classes {
            p.add_term(TermKey::new(SiteSet::empty(), w.clone()), v);
        }
        p
    }
}

/// Sums out `σ₀, σ₁` against the kernel:
/// `exp(Σ f(V,W) σ(V) s(W)) = Σ_{σ₀σ₁} k(σ₀,σ₁;s₀) exp(c(σ,s))`.
///
/// `c` must have boundary keys (`X ≥ 0` meeting `{0,1}`, `Y < 0`).
pub fn block_sum_out<S: Scalar>(
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    cfg: &AlgebraConfig,
) -> Result<FTable<S>> {
    let bv = BlockValues::new(c, cfg)?;
    let mut logs = Vec::with_capacity(bv.external_count());
    for e in 0..bv.external_count() {
        let (w, v) = bv.block(kernel, e);
        logs.push(crate::scalar::log_sum_exp(&w, &v).ok_or(Error::NonPositiveBlockSum)?);
    }
    let coeffs = coefficients_from_value_table(logs);
    let terms = SpinPolynomial::from_dense(&coeffs, &bv.layout.external, cfg, |m| m != 0);
    Ok(FTable {
        terms,
        constant: coeffs[0],
    })
}

/// Sums out block `b` (`σ_{2b}, σ_{2b+1}` with block spin `s_b`); `c` must
/// have boundary keys relative to that block.
pub fn block_sum_out_at<S: Scalar>(
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    b: i32,
    cfg: &AlgebraConfig,
) -> Result<FTable<S>> {
    let local = c.shift(-2 * b, -b)?;
    block_sum_out(&local, kernel, cfg)?.shifted(2 * b, b)
}

/// `F(c)`: the sum-out followed by the shift re-indexing.
pub fn rg_f<S: Scalar>(
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    cfg: &AlgebraConfig,
) -> Result<SpinPolynomial<S>> {
    Ok(block_sum_out(c, kernel, cfg)?.boundary_map())
}

/// `(p - q) / (p + q)` for non-negative `p, q`, arranged so that each of
/// `p` and `q` enters once.
fn signed_ratio<S: Scalar>(p: S, q: S) -> S {
    if q.is_zero() {
        return S::one();
    }
    if p.is_zero() {
        return -S::one();
    }
    let two = S::from_f64(2.0);
    if p.upper() >= q.upper() {
        two / (S::one() + q / p) - S::one()
    } else {
        S::one() - two / (S::one() + p / q)
    }
}

/// `⟨σ(A)⟩_c` for all three `A`, as polynomials in `σ(U) s(T)`,
/// `U ≥ 2`, `T ≤ 0`; indexed as [`BlockSubset::ALL`].
pub fn block_expectations<S: Scalar>(
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    cfg: &AlgebraConfig,
) -> Result<[SpinPolynomial<S>; 3]> {
    let bv = BlockValues::new(c, cfg)?;
    let n = bv.external_count();
    let mut tables: [Vec<S>; 3] = core::array::from_fn(|_| Vec::with_capacity(n));
    for e in 0..n {
        let (w, v) = bv.block(kernel, e);
        let mut shift = f64::NEG_INFINITY;
        for b in 0..4 {
            if !w[b].is_zero() {
                shift = shift.max(v[b].upper());
            }
        }
        if shift == f64::NEG_INFINITY {
            return Err(Error::NonPositiveBlockSum);
        }
        let s = S::from_f64(shift);
        let t: [S; 4] = core::array::from_fn(|b| {
            if w[b].is_zero() {
                S::zero()
            } else {
                w[b] * (v[b] - s).exp()
            }
        });
        for a in BlockSubset::ALL {
            let mut p = S::zero();
            let mut q = S::zero();
            for (b, &tb) in t.iter().enumerate() {
                if a.negative(b) {
                    q += tb;
                } else {
                    p += tb;
                }
            }
            if (p + q).upper() <= 0.0 {
                return Err(Error::NonPositiveBlockSum);
            }
            tables[a.index()].push(signed_ratio(p, q));
        }
    }
    let ext = &bv.layout.external;
    Ok(tables.map(|vals| {
        SpinPolynomial::from_dense(&coefficients_from_value_table(vals), ext, cfg, |_| true)
    }))
}

/// `⟨σ(A)⟩_c` for a single `A`.
pub fn block_expectation<S: Scalar>(
    a: BlockSubset,
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    cfg: &AlgebraConfig,
) -> Result<SpinPolynomial<S>> {
    let [e0, e1, e01] = block_expectations(c, kernel, cfg)?;
    Ok(match a {
        BlockSubset::First => e0,
        BlockSubset::Second => e1,
        BlockSubset::Both => e01,
    })
}

/// `𝒟(c) = max_A e^{-μ|A|} ‖⟨σ(A)⟩_c‖` with its three components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction<S> {
    pub value: S,
    pub components: [S; 3],
}

pub fn contraction_diagnostic<S: Scalar>(
    c: &SpinPolynomial<S>,
    kernel: &BlockKernel<S>,
    w: &NormWeights,
    cfg: &AlgebraConfig,
) -> Result<Contraction<S>> {
    let exps = block_expectations(c, kernel, cfg)?;
    Ok(contraction_from_expectations(&exps, w))
}

pub(crate) fn contraction_from_expectations<S: Scalar>(
    exps: &[SpinPolynomial<S>; 3],
    w: &NormWeights,
) -> Contraction<S> {
    let components: [S; 3] = core::array::from_fn(|i| {
        let a = BlockSubset::ALL[i];
        let damp = (S::from_f64(-w.mu) * S::from_f64(a.size() as f64)).exp();
        damp * exps[i].weighted_norm(w)
    });
    let value = components[0].max(components[1]).max(components[2]);
    Contraction { value, components }
}

/// `ρ(r) = 2(e^r - 1)/(2 - e^r)` on `0 ≤ r < ln 2`.
pub fn rho<S: Scalar>(r: S) -> Result<S> {
    if r.lower() < 0.0 || r.lower().is_nan() {
        return Err(Error::Domain {
            function: "rho",
            value: r.lower(),
        });
    }
    let er = r.exp();
    let den = S::from_f64(2.0) - er;
    if den.lower() <= 0.0 {
        return Err(Error::Domain {
            function: "rho",
            value: r.upper(),
        });
    }
    Ok(S::from_f64(2.0) * (er - S::one()) / den)
}

/// The `r ≥ 0` with `ρ(r) = y`, i.e. `ln((2 + 2y)/(2 + y))`.
pub fn rho_inverse<S: Scalar>(y: S) -> S {
    let two = S::from_f64(2.0);
    ((two + two * y) / (two + y)).ln()
}
