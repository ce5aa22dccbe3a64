use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::{Interval, Scalar};
use crate::spin_algebra::{NormWeights, SiteSet, SpinPolynomial};

/// Number of explicitly summed terms in [`coupling_tail_sum`].
pub const PARTIAL_SUM_TERMS: u64 = 1_000_000;

/// Default range of explicit long-range terms in `Ĥ`.
pub const DEFAULT_R_MAX: usize = 100;

/// Long-range coupling rule `J(d)` for `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Couplings {
    /// `J(d) = d^{-α}`.
    PowerLaw,
    /// `J(d) = table[d - 2]`, zero past the end of the table.
    Table(Vec<f64>),
}

/// `H = -γ Σ σᵢσᵢ₊₁ - ε Σ_{|i-j|≥2} J(|i-j|) σᵢσⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
    pub couplings: Couplings,
    pub r_max: usize,
}

impl HamiltonianSpec {
    pub fn new(gamma: f64, eps: f64, alpha: f64) -> Result<Self> {
        let spec = HamiltonianSpec {
            gamma,
            eps,
            alpha,
            couplings: Couplings::PowerLaw,
            r_max: DEFAULT_R_MAX,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_r_max(mut self, r_max: usize) -> Result<Self> {
        self.r_max = r_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_couplings(mut self, couplings: Couplings) -> Result<Self> {
        self.couplings = couplings;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter("gamma must be positive"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter("eps must be non-negative"));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter("alpha must exceed 1"));
        }
        if self.r_max < 2 {
            return Err(Error::InvalidParameter("r_max must be at least 2"));
        }
        if let Couplings::Table(t) = &self.couplings {
            if t.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("coupling table must be finite"));
            }
        }
        Ok(())
    }

    /// `J(d)` for `d ≥ 2`.
    pub fn coupling<S: Scalar>(&self, d: usize) -> S {
        match &self.couplings {
            Couplings::PowerLaw => S::from_i64(d as i64).powf(S::from_f64(-self.alpha)),
            Couplings::Table(t) => t.get(d - 2).map_or_else(S::zero, |&v| S::from_f64(v)),
        }
    }

    /// Enclosure of `c = 2 Σ_{d≥2} |J(d)|`.
    pub fn coupling_constant(&self) -> Result<Interval> {
        self.coupling_tail(2)
    }

    /// Enclosure of `2 Σ_{d ≥ start} |J(d)|`.
    pub fn coupling_tail(&self, start: usize) -> Result<Interval> {
        match &self.couplings {
            Couplings::PowerLaw => coupling_tail_sum(self.alpha, start as u64),
            Couplings::Table(t) => {
                let s: Interval = t
                    .iter()
                    .skip(start.saturating_sub(2))
                    .map(|v| Interval::point(v.abs()))
                    .sum();
                Ok(s.scale_pow2(1))
            }
        }
    }
}

/// `Ĥ` with long-range terms up to range `r_max`, together with an
/// enclosure of the weighted norm of everything beyond.
#[derive(Debug, Clone)]
pub struct HamiltonianHat<S> {
    pub poly: SpinPolynomial<S>,
    pub tail: Interval,
}

/// `Ĥ₀ = γσ₀σ₁ + γσ₁σ₂`.
pub fn nearest_neighbor_hat<S: Scalar>(gamma: f64) -> SpinPolynomial<S> {
    let g = S::from_f64(gamma);
    SpinPolynomial::from_terms_uncapped([
        (SiteSet::from_sorted(alloc::vec![0, 1]), SiteSet::empty(), g),
        (SiteSet::from_sorted(alloc::vec![1, 2]), SiteSet::empty(), g),
    ])
}

/// `Ĥ = γσ₀σ₁ + γσ₁σ₂ + ε Σ_{i∈{0,1}} Σ_{i+2 ≤ j ≤ i+r_max} J(j-i) σᵢσⱼ`.
pub fn hamiltonian_hat<S: Scalar>(spec: &HamiltonianSpec, w: &NormWeights) -> Result<HamiltonianHat<S>> {
    hamiltonian_hat_range(spec, spec.r_max, w)
}

pub fn hamiltonian_hat_range<S: Scalar>(
    spec: &HamiltonianSpec,
    r_max: usize,
    w: &NormWeights,
) -> Result<HamiltonianHat<S>> {
    spec.validate()?;
    if r_max < 2 {
        return Err(Error::InvalidParameter("r_max must be at least 2"));
    }
    let mut poly = nearest_neighbor_hat::<S>(spec.gamma);
    let eps = S::from_f64(spec.eps);
    if spec.eps > 0.0 {
        for d in 2..=r_max {
            let j = eps * spec.coupling::<S>(d);
            for i in 0..2i32 {
                let x = SiteSet::from_sorted(alloc::vec![i, i + d as i32]);
                poly.add_term(crate::spin_algebra::TermKey::new(x, SiteSet::empty()), j);
            }
        }
    }
    let tail = if spec.eps > 0.0 {
        Interval::point(spec.eps) * spec.coupling_tail(r_max + 1)? * w.factor::<Interval>(2, 0)
    } else {
        Interval::point(0.0)
    };
    Ok(HamiltonianHat { poly, tail })
}

/// `‖Ĥ - Ĥ₀‖ = ε e^{2μ} c` and the unweighted `ε c`.
pub fn long_range_norm(spec: &HamiltonianSpec, w: &NormWeights) -> Result<(Interval, Interval)> {
    spec.validate()?;
    if spec.eps == 0.0 {
        return Ok((Interval::point(0.0), Interval::point(0.0)));
    }
    let plain = Interval::point(spec.eps) * spec.coupling_constant()?;
    Ok((plain * w.factor::<Interval>(2, 0), plain))
}

/// Enclosure of `2 Σ_{d ≥ start} d^{-α}`: [`PARTIAL_SUM_TERMS`] explicit
/// terms plus the integral comparison bounds on the remainder.
pub fn coupling_tail_sum(alpha: f64, start: u64) -> Result<Interval> {
    power_tail_enclosure(alpha, start, PARTIAL_SUM_TERMS).map(|s| s.scale_pow2(1))
}

/// Enclosure of `Σ_{d ≥ start} d^{-α}` with `count` explicit terms.
pub fn power_tail_enclosure(alpha: f64, start: u64, count: u64) -> Result<Interval> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain {
            function: "power-law tail sum",
            value: alpha,
        });
    }
    if start < 1 {
        return Err(Error::InvalidParameter("tail sum must start at d >= 1"));
    }
    let neg_alpha = Interval::point(-alpha);
    let mut parts = Vec::with_capacity(count as usize);
    for d in start..start + count {
        parts.push((Interval::point(d as f64).ln() * neg_alpha).exp());
    }
    let partial = crate::scalar::pairwise_sum(&parts);
    // Σ_{d ≥ n} d^{-α} lies between ∫_n^∞ and ∫_{n-1}^∞ of x^{-α}
    let n = start + count;
    let integral = |x: f64| {
        let a1 = Interval::point(alpha) - Interval::point(1.0);
        (Interval::point(x).ln() * (-a1)).exp() / a1
    };
    let lo = integral(n as f64).lo();
    let hi = integral((n - 1) as f64).hi();
    Ok(partial + Interval::new(lo, hi))
}
