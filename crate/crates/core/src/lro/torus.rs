//! Periodic long-range couplings on the ring `Λ = {1-m, ..., m}` and the
//! quantities built from their Fourier transform.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::{Interval, Scalar};

/// Explicit terms summed per branch before the tail enclosure takes over,
/// before dividing by the ring length.
const EXPLICIT_BUDGET: u64 = 8192;
const MIN_EXPLICIT: u64 = 16;

/// Relative tolerance of the γ bisection in [`lro_gamma_threshold`].
pub const THRESHOLD_REL_TOL: f64 = 1e-10;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain {
            function: "periodic coupling",
            value: alpha,
        });
    }
    Ok(())
}

/// `Σ_{n ≥ 0} (a + L n)^{-α}` for `a > 0`. The summand is convex and
/// decreasing in `n`, so the remainder after `count` terms lies between the
/// trapezoid and midpoint bounds of its integral.
fn shifted_zeta(a: f64, len: f64, alpha: f64, count: u64) -> Interval {
    let neg_alpha = Interval::point(-alpha);
    let power = |x: f64| (Interval::point(x).ln() * neg_alpha).exp();
    let mut partial = Interval::point(0.0);
    // smallest terms first
    for n in (0..count).rev() {
        partial += power(a + len * n as f64);
    }
    let a1 = Interval::point(alpha - 1.0);
    let tail_integral = |y: f64| {
        let base = Interval::point(a + len * y);
        (base.ln() * (-a1)).exp() / (a1 * Interval::point(len))
    };
    let n = count as f64;
    let lo = tail_integral(n) + power(a + len * n).scale_pow2(-1);
    let hi = tail_integral(n - 0.5);
    partial + Interval::new(lo.lo(), hi.hi())
}

/// Enclosure of `Σ_{n ∈ Z} |d + 2mn|^{-α}`.
pub fn periodic_coupling(d: i64, m: usize, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(Error::InvalidParameter("torus half-length m must be >= 1"));
    }
    let len = 2 * m as i64;
    let r = d.rem_euclid(len);
    if r == 0 {
        return Err(Error::Domain {
            function: "periodic coupling at d = 0 mod 2m",
            value: d as f64,
        });
    }
    let count = MIN_EXPLICIT.max(EXPLICIT_BUDGET / len as u64);
    let l = len as f64;
    Ok(shifted_zeta(r as f64, l, alpha, count) + shifted_zeta((len - r) as f64, l, alpha, count))
}

/// Periodic couplings of a ring together with the regularizer `R` on the
/// dual lattice `p_k = πk/m`, `k = 0..2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCouplings {
    m: usize,
    alpha: f64,
    /// `J_{0,d}` for `d = 0..2m`; the `d = 0` slot is unused and zero.
    coupling: Vec<Interval>,
    /// `1 - cos(πt/m)` for `t = 0..2m`.
    one_minus_cos: Vec<f64>,
    regularizer: Vec<f64>,
}

impl TorusCouplings {
    pub fn new(m: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if m < 2 {
            return Err(Error::InvalidParameter("torus half-length m must be >= 2"));
        }
        let len = 2 * m;
        let mut coupling = alloc::vec![Interval::point(0.0); len];
        for d in 1..=m {
            let j = periodic_coupling(d as i64, m, alpha)?;
            coupling[d] = j;
            coupling[len - d] = j;
        }
        let one_minus_cos: Vec<f64> = (0..len)
            .map(|t| {
                // 2 sin²(x/2) keeps relative accuracy near p = 0
                let s = libm::sin(PI * t as f64 / (2 * m) as f64);
                2.0 * s * s
            })
            .collect();
        let mid: Vec<f64> = coupling.iter().map(|j| j.mid()).collect();
        let mut regularizer = alloc::vec![0.0; len];
        for k in 1..=m {
            // n runs over Λ \ {0}; only n mod 2m matters
            let mut acc = 0.0;
            for (n, jn) in mid.iter().enumerate().skip(1) {
                acc += jn * one_minus_cos[(k * n) % len];
            }
            regularizer[k] = acc;
            regularizer[len - k] = acc;
        }
        Ok(TorusCouplings {
            m,
            alpha,
            coupling,
            one_minus_cos,
            regularizer,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of sites `2m`.
    pub fn sites(&self) -> usize {
        2 * self.m
    }

    /// `J_{0,d}` as an enclosure; zero at `d ≡ 0`.
    pub fn coupling_enclosure(&self, d: i64) -> Interval {
        self.coupling[d.rem_euclid(self.sites() as i64) as usize]
    }

    /// Midpoint of [`Self::coupling_enclosure`].
    pub fn coupling(&self, d: i64) -> f64 {
        self.coupling_enclosure(d).mid()
    }

    /// Momentum `p_k = πk/m`.
    pub fn momentum(&self, k: usize) -> f64 {
        PI * k as f64 / self.m as f64
    }

    pub fn one_minus_cos(&self, k: usize) -> f64 {
        self.one_minus_cos[k % self.sites()]
    }

    /// `R(p_k) = Σ_{n ∈ Λ, n ≠ 0} J_{0,n} (1 - cos p_k n)`.
    pub fn spectral_r(&self, k: usize) -> f64 {
        self.regularizer[k % self.sites()]
    }
}

/// Ring model with nearest-neighbor coupling `γ - ε` on top of `ε J`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusModel {
    gamma: f64,
    eps: f64,
    couplings: TorusCouplings,
}

impl TorusModel {
    /// Requires `γ ≥ ε ≥ 0`, `α > 1` and `m ≥ 2`.
    pub fn new(m: usize, gamma: f64, eps: f64, alpha: f64) -> Result<Self> {
        Self::from_couplings(TorusCouplings::new(m, alpha)?, gamma, eps)
    }

    pub fn from_couplings(couplings: TorusCouplings, gamma: f64, eps: f64) -> Result<Self> {
        if !gamma.is_finite() || !eps.is_finite() || eps < 0.0 || gamma < eps {
            return Err(Error::InvalidParameter("torus model needs gamma >= eps >= 0"));
        }
        Ok(TorusModel {
            gamma,
            eps,
            couplings,
        })
    }

    /// Same couplings at a different `γ`.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < self.eps {
            return Err(Error::InvalidParameter("torus model needs gamma >= eps >= 0"));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn m(&self) -> usize {
        self.couplings.m
    }

    pub fn alpha(&self) -> f64 {
        self.couplings.alpha
    }

    pub fn sites(&self) -> usize {
        self.couplings.sites()
    }

    pub fn couplings(&self) -> &TorusCouplings {
        &self.couplings
    }

    /// Label in `Λ` of the storage index `i ∈ 0..2m`.
    pub fn site_label(&self, i: usize) -> i64 {
        i as i64 + 1 - self.m() as i64
    }

    pub fn is_nearest_neighbor(&self, d: i64) -> bool {
        let r = d.rem_euclid(self.sites() as i64);
        r == 1 || r == self.sites() as i64 - 1
    }

    /// `(γ - ε) N_{0,d} + ε J_{0,d}`.
    pub fn pair_coupling(&self, d: i64) -> f64 {
        let nn = if self.is_nearest_neighbor(d) {
            self.gamma - self.eps
        } else {
            0.0
        };
        nn + self.eps * self.couplings.coupling(d)
    }

    pub fn spectral_r(&self, k: usize) -> f64 {
        self.couplings.spectral_r(k)
    }

    /// `E(p_k) = (γ - ε)(1 - cos p_k) + (ε/2) R(p_k)`.
    pub fn dispersion_e(&self, k: usize) -> f64 {
        (self.gamma - self.eps) * self.couplings.one_minus_cos(k)
            + 0.5 * self.eps * self.couplings.spectral_r(k)
    }
}

/// `R(p_k)` of `model`.
pub fn spectral_r(k: usize, model: &TorusModel) -> f64 {
    model.spectral_r(k)
}

/// `E(p_k)` of `model`.
pub fn dispersion_e(k: usize, model: &TorusModel) -> f64 {
    model.dispersion_e(k)
}

/// Constant `c = π^{1-α}/4` with `R(p) ≥ c p^{α-1}` on `(0, π]`: keep only
/// `n ∈ [π/2p, π/p]`, where `1 - cos pn ≥ 1`, `J_{0,n} ≥ (p/π)^α`, and at
/// least `π/4p` integers lie.
pub fn regularizer_lower_constant(alpha: f64) -> f64 {
    libm::pow(PI, 1.0 - alpha) / 4.0
}

/// `(1/2m) Σ_{p ≠ 0} 1/R(p)`.
pub fn regularizer_sum(m: usize, alpha: f64) -> Result<f64> {
    Ok(regularizer_sum_of(&TorusCouplings::new(m, alpha)?))
}

pub fn regularizer_sum_of(c: &TorusCouplings) -> f64 {
    let len = c.sites();
    let s: f64 = (1..len).map(|k| 1.0 / c.spectral_r(k)).sum();
    s / len as f64
}

/// `(1/2m) Σ_{p ≠ 0} 1/(c p^{α-1})` with `p` folded into `(0, π]`; an upper
/// bound for [`regularizer_sum`].
pub fn regularizer_comparison(m: usize, alpha: f64) -> f64 {
    let c = regularizer_lower_constant(alpha);
    let len = 2 * m;
    let s: f64 = (1..len)
        .map(|k| {
            let p = PI * k.min(len - k) as f64 / m as f64;
            1.0 / (c * libm::pow(p, alpha - 1.0))
        })
        .sum();
    s / len as f64
}

/// `(1/2m) Σ_{p ≠ 0} 1/(2E(p))`.
pub fn infrared_sum(model: &TorusModel) -> f64 {
    let len = model.sites();
    let s: f64 = (1..len).map(|k| 0.5 / model.dispersion_e(k)).sum();
    s / len as f64
}

/// Smallest `γ` (to relative accuracy [`THRESHOLD_REL_TOL`]) with
/// `infrared_sum < 1`. This is a sufficient condition for an atom at the
/// origin, not the sharp one.
pub fn lro_gamma_threshold(eps: f64, alpha: f64, m: usize) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter("threshold search needs eps > 0"));
    }
    let model = TorusModel::new(m, eps, eps, alpha)?;
    if infrared_sum(&model) < 1.0 {
        return Ok(eps);
    }
    let mut lo = eps;
    let mut hi = 2.0 * eps.max(0.5);
    let mut model = model.with_gamma(hi)?;
    let mut doublings = 0;
    while infrared_sum(&model) >= 1.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence {
                what: "threshold bracket",
                iterations: doublings,
            });
        }
        model = model.with_gamma(hi)?;
    }
    while hi - lo > THRESHOLD_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        model = model.with_gamma(mid)?;
        if infrared_sum(&model) < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
