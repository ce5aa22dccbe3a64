use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use super::sites::{LocalSupport, Role, SiteSet, TermKey, Windows};
use super::transform::{coefficients_from_value_table, values_from_coefficients};
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Scalar};

/// Default cap on the number of distinct sites of a polynomial that is
/// handled by dense configuration-space transforms.
pub const DEFAULT_MAX_SUPPORT: usize = 24;

/// Coefficients whose weighted magnitude falls below this are dropped after
/// algebra operations.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

/// Weights `μ, ν ≥ 0` of the norm `Σ |g(X,Y)| e^{μ|X| + ν|Y|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormWeights {
    pub mu: f64,
    pub nu: f64,
}

impl NormWeights {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter("mu must be finite and non-negative"));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter("nu must be finite and non-negative"));
        }
        Ok(NormWeights { mu, nu })
    }

    /// Weights with `ν = 0`.
    pub fn mu(mu: f64) -> Result<Self> {
        Self::new(mu, 0.0)
    }

    pub const fn unweighted() -> Self {
        NormWeights { mu: 0.0, nu: 0.0 }
    }

    /// `e^{μ nx + ν ny}` in the requested arithmetic.
    pub fn factor<S: Scalar>(&self, nx: usize, ny: usize) -> S {
        let e = S::from_f64(self.mu) * S::from_f64(nx as f64)
            + S::from_f64(self.nu) * S::from_f64(ny as f64);
        e.exp()
    }

    /// Table of factors for `|X| ≤ max_x`, `|Y| ≤ max_y`.
    pub(crate) fn table<S: Scalar>(&self, max_x: usize, max_y: usize) -> WeightTable<S> {
        let stride = max_y + 1;
        let mut data = Vec::with_capacity((max_x + 1) * stride);
        for nx in 0..=max_x {
            for ny in 0..=max_y {
                data.push(self.factor::<S>(nx, ny));
            }
        }
        WeightTable { data, stride }
    }
}

impl Default for NormWeights {
    fn default() -> Self {
        NormWeights::unweighted()
    }
}

pub(crate) struct WeightTable<S> {
    data: Vec<S>,
    stride: usize,
}

impl<S: Scalar> WeightTable<S> {
    #[inline]
    pub(crate) fn get(&self, nx: usize, ny: usize) -> S {
        self.data[nx * self.stride + ny]
    }
}

/// Limits and pruning applied by algebra operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraConfig {
    pub max_support: usize,
    pub prune_tol: f64,
    pub prune_weights: NormWeights,
}

impl AlgebraConfig {
    /// Configuration that never drops a coefficient (used for rigorous runs).
    pub fn exact() -> Self {
        AlgebraConfig {
            prune_tol: 0.0,
            ..AlgebraConfig::default()
        }
    }

    pub fn with_weights(mut self, w: NormWeights) -> Self {
        self.prune_weights = w;
        self
    }
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            max_support: DEFAULT_MAX_SUPPORT,
            prune_tol: DEFAULT_PRUNE_TOL,
            prune_weights: NormWeights::unweighted(),
        }
    }
}

/// A multilinear function `Σ g(X,Y) σ(X) s(Y)` of original and block spins.
///
/// Terms are kept in key order with no exact zeros. `pruned` records an
/// upper bound on the weighted norm of coefficients dropped when this value
/// was produced.
#[derive(Debug, Clone)]
pub struct SpinPolynomial<S> {
    terms: BTreeMap<TermKey, S>,
    windows: Windows,
    pruned: f64,
}

impl<S: Scalar> PartialEq for SpinPolynomial<S> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<S: Scalar> Default for SpinPolynomial<S> {
    fn default() -> Self {
        Self::zero()
    }
}

fn count_support<'a>(keys: impl Iterator<Item = &'a TermKey>) -> usize {
    let mut sig = BTreeSet::new();
    let mut blk = BTreeSet::new();
    for k in keys {
        sig.extend(k.x.iter());
        blk.extend(k.y.iter());
    }
    sig.len() + blk.len()
}

impl<S: Scalar> SpinPolynomial<S> {
    pub fn zero() -> Self {
        SpinPolynomial {
            terms: BTreeMap::new(),
            windows: Windows::UNBOUNDED,
            pruned: 0.0,
        }
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(TermKey::constant(), c);
        p
    }

    pub fn monomial(x: SiteSet, y: SiteSet, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(TermKey::new(x, y), c);
        p
    }

    /// Builds a polynomial from `(X, Y, coefficient)` triples, merging
    /// duplicate keys and dropping zeros. The total support must not exceed
    /// [`DEFAULT_MAX_SUPPORT`] sites.
    pub fn from_terms(terms: impl IntoIterator<Item = (SiteSet, SiteSet, S)>) -> Result<Self> {
        Self::from_terms_with_cap(terms, DEFAULT_MAX_SUPPORT)
    }

    pub fn from_terms_with_cap(
        terms: impl IntoIterator<Item = (SiteSet, SiteSet, S)>,
        cap: usize,
    ) -> Result<Self> {
        let p = Self::from_terms_uncapped(terms);
        let n = p.support_size();
        if n > cap {
            return Err(Error::SupportCap { found: n, cap });
        }
        Ok(p)
    }

    pub(crate) fn from_terms_uncapped(terms: impl IntoIterator<Item = (SiteSet, SiteSet, S)>) -> Self {
        let mut p = Self::zero();
        for (x, y, c) in terms {
            p.add_term(TermKey::new(x, y), c);
        }
        p
    }

    pub(crate) fn from_map(terms: BTreeMap<TermKey, S>) -> Self {
        let mut p = SpinPolynomial {
            terms,
            windows: Windows::UNBOUNDED,
            pruned: 0.0,
        };
        p.terms.retain(|_, v| !v.is_zero());
        p
    }

    /// Attaches site windows, failing if a present key lies outside them.
    pub fn with_windows(mut self, windows: Windows) -> Result<Self> {
        for k in self.terms.keys() {
            windows.check(k)?;
        }
        self.windows = windows;
        Ok(self)
    }

    pub fn windows(&self) -> Windows {
        self.windows
    }

    pub fn check_role(&self, role: Role) -> Result<()> {
        self.terms.keys().try_for_each(|k| role.check(k))
    }

    /// Adds `c` to the coefficient of `key`, removing the entry if it cancels.
    pub fn add_term(&mut self, key: TermKey, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn get(&self, key: &TermKey) -> Option<S> {
        self.terms.get(key).copied()
    }

    /// Coefficient of `σ(x) s(y)`; zero when absent.
    pub fn coefficient(&self, x: &[i32], y: &[i32]) -> S {
        let key = match (SiteSet::new(x.iter().copied()), SiteSet::new(y.iter().copied())) {
            (Ok(x), Ok(y)) => TermKey::new(x, y),
            _ => return S::zero(),
        };
        self.get(&key).unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.get(&TermKey::constant()).unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &S)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<TermKey, S> {
        self.terms
    }

    pub fn pruned_mass(&self) -> f64 {
        self.pruned
    }

    pub(crate) fn set_pruned_mass(&mut self, m: f64) {
        self.pruned = m;
    }

    /// Sorted distinct sites of every key, original lattice first.
    pub fn support(&self) -> LocalSupport {
        let mut sig = BTreeSet::new();
        let mut blk = BTreeSet::new();
        for k in self.terms.keys() {
            sig.extend(k.x.iter());
            blk.extend(k.y.iter());
        }
        LocalSupport::new(sig.into_iter().collect(), blk.into_iter().collect())
            .unwrap_or_default()
    }

    pub fn support_size(&self) -> usize {
        count_support(self.terms.keys())
    }

    pub fn max_x_len(&self) -> usize {
        self.terms.keys().map(|k| k.x.len()).max().unwrap_or(0)
    }

    pub fn max_y_len(&self) -> usize {
        self.terms.keys().map(|k| k.y.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: S) -> Self {
        let terms = self.terms.iter().map(|(k, &v)| (k.clone(), v * c)).collect();
        Self::from_map(terms)
    }

    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(S) -> T) -> SpinPolynomial<T> {
        let terms = self.terms.iter().map(|(k, &v)| (k.clone(), f(v))).collect();
        SpinPolynomial::from_map(terms)
    }

    pub fn retain(&mut self, mut f: impl FnMut(&TermKey, &S) -> bool) {
        self.terms.retain(|k, v| f(k, v));
    }

    /// Product via `σ(A)σ(B) = σ(A Δ B)`; the combined support must fit
    /// `cfg.max_support`.
    pub fn multiply(&self, other: &Self, cfg: &AlgebraConfig) -> Result<Self> {
        let n = count_support(self.terms.keys().chain(other.terms.keys()));
        if n > cfg.max_support || n > 63 {
            return Err(Error::SupportCap {
                found: n,
                cap: cfg.max_support.min(63),
            });
        }
        let sup = union_support(self, other);
        let lhs: Vec<(u64, S)> = self.masked(&sup);
        let rhs: Vec<(u64, S)> = other.masked(&sup);
        let mut acc: BTreeMap<u64, S> = BTreeMap::new();
        for &(ma, a) in &lhs {
            for &(mb, b) in &rhs {
                let v = a * b;
                acc.entry(ma ^ mb).and_modify(|e| *e += v).or_insert(v);
            }
        }
        let mut out = Self::from_map(acc.into_iter().map(|(m, v)| (sup.key_of(m), v)).collect());
        out.prune_with(cfg);
        Ok(out)
    }

    fn masked(&self, sup: &LocalSupport) -> Vec<(u64, S)> {
        self.terms
            .iter()
            .map(|(k, &v)| (sup.mask_of(k).expect("key inside union support"), v))
            .collect()
    }

    /// `Σ |g(X,Y)| e^{μ|X| + ν|Y|}`, accumulated pairwise in key order.
    pub fn weighted_norm(&self, w: &NormWeights) -> S {
        let table = w.table::<S>(self.max_x_len(), self.max_y_len());
        let parts: Vec<S> = self
            .terms
            .iter()
            .map(|(k, &v)| v.abs() * table.get(k.x.len(), k.y.len()))
            .collect();
        pairwise_sum(&parts)
    }

    /// Value of the function at the given spins (each `±1`).
    pub fn evaluate(&self, sigma: &BTreeMap<i32, i8>, block: &BTreeMap<i32, i8>) -> Result<S> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for (k, &v) in &self.terms {
            let mut sign = 1i8;
            for s in k.x.iter() {
                let spin = *sigma.get(&s).ok_or(Error::MissingSite {
                    lattice: "original",
                    site: s,
                })?;
                check_spin(spin)?;
                sign *= spin;
            }
            for s in k.y.iter() {
                let spin = *block.get(&s).ok_or(Error::MissingSite {
                    lattice: "block",
                    site: s,
                })?;
                check_spin(spin)?;
                sign *= spin;
            }
            parts.push(if sign > 0 { v } else { -v });
        }
        Ok(pairwise_sum(&parts))
    }

    /// Dense coefficient table over `support` (all keys must lie inside it).
    pub fn dense_coefficients(&self, support: &LocalSupport) -> Result<Vec<S>> {
        let mut dense = alloc::vec![S::zero(); support.configurations()];
        for (k, &v) in &self.terms {
            let m = support
                .mask_of(k)
                .ok_or(Error::InvalidKey("term lies outside the declared support"))?;
            dense[m as usize] += v;
        }
        Ok(dense)
    }

    /// Values on all `2^n` configurations of `support`; configuration bit
    /// `1` means spin `-1`.
    pub fn values_on(&self, support: &LocalSupport) -> Result<Vec<S>> {
        Ok(values_from_coefficients(self.dense_coefficients(support)?))
    }

    /// Inverse of [`values_on`](Self::values_on):
    /// `g(X,Y) = N^{-1} Σ_{σ,s} σ(X) s(Y) g(σ,s)`.
    pub fn coefficients_from_values(
        values: Vec<S>,
        support: &LocalSupport,
        cfg: &AlgebraConfig,
    ) -> Result<Self> {
        if support.len() > cfg.max_support {
            return Err(Error::SupportCap {
                found: support.len(),
                cap: cfg.max_support,
            });
        }
        let expected = support.configurations();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                found: values.len(),
                expected,
            });
        }
        let coeffs = coefficients_from_value_table(values);
        Ok(Self::from_dense(&coeffs, support, cfg, |_| true))
    }

    /// Collects a dense coefficient table into a polynomial, skipping masks
    /// rejected by `keep` and pruning per `cfg`. Only pruned mass is
    /// recorded.
    pub(crate) fn from_dense(
        coeffs: &[S],
        support: &LocalSupport,
        cfg: &AlgebraConfig,
        mut keep: impl FnMut(u64) -> bool,
    ) -> Self {
        let table = cfg
            .prune_weights
            .table::<S>(support.sigma_sites().len(), support.block_sites().len());
        let mut terms = BTreeMap::new();
        let mut dropped = 0.0;
        for (m, &v) in coeffs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let m = m as u64;
            let (nx, ny) = support.split_popcount(m);
            let weighted = v.magnitude() * table.get(nx, ny).upper();
            if !keep(m) {
                continue;
            }
            if weighted < cfg.prune_tol {
                dropped += weighted;
                continue;
            }
            terms.insert(support.key_of(m), v);
        }
        let mut p = Self::from_map(terms);
        p.pruned = dropped;
        p
    }

    /// Moves every key `(X, Y)` to `(X + dsigma, Y + dblock)`.
    pub fn shift(&self, dsigma: i32, dblock: i32) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, &v) in &self.terms {
            let nk = TermKey::new(k.x.shifted(dsigma), k.y.shifted(dblock));
            self.windows.check(&nk)?;
            terms.insert(nk, v);
        }
        Ok(SpinPolynomial {
            terms,
            windows: self.windows,
            pruned: self.pruned,
        })
    }

    /// Drops coefficients with weighted magnitude below `tol`; returns an
    /// upper bound on the weighted norm removed.
    pub fn prune(&mut self, tol: f64, w: &NormWeights) -> f64 {
        if tol <= 0.0 {
            return 0.0;
        }
        let table = w.table::<S>(self.max_x_len(), self.max_y_len());
        let mut dropped = 0.0;
        self.terms.retain(|k, v| {
            let weighted = v.magnitude() * table.get(k.x.len(), k.y.len()).upper();
            if weighted < tol {
                dropped += weighted;
                false
            } else {
                true
            }
        });
        dropped
    }

    fn prune_with(&mut self, cfg: &AlgebraConfig) {
        self.pruned = self.prune(cfg.prune_tol, &cfg.prune_weights);
    }
}

fn check_spin(s: i8) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::InvalidSpin(s))
    }
}

fn union_support<S: Scalar>(a: &SpinPolynomial<S>, b: &SpinPolynomial<S>) -> LocalSupport {
    let mut sig = BTreeSet::new();
    let mut blk = BTreeSet::new();
    for k in a.terms.keys().chain(b.terms.keys()) {
        sig.extend(k.x.iter());
        blk.extend(k.y.iter());
    }
    LocalSupport::new(sig.into_iter().collect(), blk.into_iter().collect())
        .expect("support size checked by caller")
}

impl<S: Scalar> Add for &SpinPolynomial<S> {
    type Output = SpinPolynomial<S>;
    fn add(self, rhs: &SpinPolynomial<S>) -> SpinPolynomial<S> {
        let mut out = self.clone();
        out.pruned = 0.0;
        for (k, &v) in &rhs.terms {
            out.add_term(k.clone(), v);
        }
        out
    }
}

impl<S: Scalar> Sub for &SpinPolynomial<S> {
    type Output = SpinPolynomial<S>;
    fn sub(self, rhs: &SpinPolynomial<S>) -> SpinPolynomial<S> {
        let mut out = self.clone();
        out.pruned = 0.0;
        for (k, &v) in &rhs.terms {
            out.add_term(k.clone(), -v);
        }
        out
    }
}

impl<S: Scalar> Neg for &SpinPolynomial<S> {
    type Output = SpinPolynomial<S>;
    fn neg(self) -> SpinPolynomial<S> {
        self.scale(-S::one())
    }
}
