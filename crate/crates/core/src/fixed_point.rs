//! Iteration of `c ↦ F(c + Ĥ)` under a finite truncation, and extraction
//! of the renormalized Hamiltonian at the limit.

use alloc::vec::Vec;

use crate::certify::SeedPoint;
use crate::error::{Error, Result};
use crate::rg_map::{
    block_sum_out, hamiltonian_hat_range, BlockKernel, HamiltonianSpec, RenormalizedHamiltonian,
};
use crate::scalar::{Interval, Scalar};
use crate::spin_algebra::{AlgebraConfig, NormWeights, SpinPolynomial};

/// Number of consecutive residual increases treated as divergence.
pub const DIVERGENCE_STREAK: usize = 5;

/// Which coefficients of `c` are kept between iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Largest original site allowed in `X`.
    pub window_sigma: i32,
    /// Most negative block site allowed in `Y`.
    pub window_s: i32,
    pub max_x_size: usize,
    pub max_y_size: usize,
    /// Coefficients with weighted magnitude below this are dropped.
    pub drop_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            window_sigma: 12,
            window_s: -8,
            max_x_size: 4,
            max_y_size: 4,
            drop_tol: 1e-12,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self, cfg: &AlgebraConfig) -> Result<()> {
        if self.window_sigma < 2 {
            return Err(Error::InvalidParameter("window_sigma must be at least 2"));
        }
        if self.window_s > -1 {
            return Err(Error::InvalidParameter("window_s must be negative"));
        }
        if self.max_x_size == 0 {
            return Err(Error::InvalidParameter("max_x_size must be positive"));
        }
        if !(self.drop_tol >= 0.0) {
            return Err(Error::InvalidParameter("drop_tol must be non-negative"));
        }
        let sites = (self.window_sigma as usize + 1) + (-self.window_s) as usize + 1;
        if sites > cfg.max_support {
            return Err(Error::SupportCap {
                found: sites,
                cap: cfg.max_support,
            });
        }
        Ok(())
    }

    /// Longest coupling range whose `Ĥ` terms fit the original-site window.
    pub fn hamiltonian_range(&self, r_max: usize) -> usize {
        r_max.min(self.window_sigma as usize - 1).max(1)
    }

    /// Drops keys outside the policy; returns the weighted norm removed.
    pub fn apply<S: Scalar>(&self, c: &mut SpinPolynomial<S>, w: &NormWeights) -> f64 {
        let mut lost = 0.0;
        c.retain(|k, v| {
            let keep = k.x.len() <= self.max_x_size
                && k.y.len() <= self.max_y_size
                && k.x.last().is_none_or(|s| s <= self.window_sigma)
                && k.y.first().is_none_or(|s| s >= self.window_s);
            if !keep {
                lost += v.magnitude() * w.factor::<f64>(k.x.len(), k.y.len());
            }
            keep
        });
        lost += c.prune(self.drop_tol, w);
        lost
    }
}

/// Stopping rule of [`iterate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationControl {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterationControl {
    fn default() -> Self {
        IterationControl {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Outcome of [`iterate`]. `c_star` is the input of the last map
/// evaluation, so `residual = ‖F(c_star + Ĥ) - c_star‖` and `hamiltonian`
/// come from the same sum-out.
#[derive(Debug, Clone)]
pub struct FixedPointResult<S> {
    pub c_star: SpinPolynomial<S>,
    pub residual: S,
    pub iterations: usize,
    pub converged: bool,
    /// `‖c_{n+1} - c_n‖` per step.
    pub residual_history: Vec<f64>,
    /// Successive ratios of `residual_history`.
    pub rate_history: Vec<f64>,
    pub hamiltonian: RenormalizedHamiltonian<S>,
    pub single_flip_norm: S,
    /// Largest weighted norm removed by truncation in a single step.
    pub truncation_loss: f64,
    /// Weighted norm of `c_star(X, ∅)` terms.
    pub empty_y_mass: f64,
    /// Range of explicit long-range terms kept in `Ĥ`.
    pub hamiltonian_range: usize,
    /// Weighted norm of the `Ĥ` terms beyond that range.
    pub hamiltonian_tail: Interval,
}

impl<S: Scalar> FixedPointResult<S> {
    /// Ratios after the first `burn_in` steps.
    pub fn rates_after(&self, burn_in: usize) -> &[f64] {
        &self.rate_history[burn_in.min(self.rate_history.len())..]
    }
}

/// Iterates `c_{n+1} = truncate(F(c_n + Ĥ))` from the seed until the step
/// `‖c_{n+1} - c_n‖` falls below `control.tol`.
pub fn iterate<S: Scalar>(
    seed: &SeedPoint,
    spec: &HamiltonianSpec,
    kernel: &BlockKernel<S>,
    policy: &TruncationPolicy,
    w: &NormWeights,
    control: &IterationControl,
    cfg: &AlgebraConfig,
) -> Result<FixedPointResult<S>> {
    policy.validate(cfg)?;
    if control.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive"));
    }
    let mut cfg = cfg.with_weights(*w);
    cfg.prune_tol = policy.drop_tol;
    let range = policy.hamiltonian_range(spec.r_max);
    let hat = hamiltonian_hat_range::<S>(spec, range.max(2), w)?;
    let (hat_poly, hat_tail) = if range < 2 {
        // window too small for any long-range term
        let tail = hat.tail + hat.poly.weighted_norm(w).to_interval();
        (crate::rg_map::nearest_neighbor_hat::<S>(spec.gamma), tail)
    } else {
        (hat.poly, hat.tail)
    };

    let mut c = seed.c0_as::<S>();
    let mut truncation_loss = policy.apply(&mut c, w);
    let mut residuals: Vec<f64> = Vec::new();
    let mut rates = Vec::new();
    let mut streak = 0;
    loop {
        let input = &c + &hat_poly;
        let table = block_sum_out(&input, kernel, &cfg)?;
        let mut next = table.boundary_map();
        let lost = policy.apply(&mut next, w) + table.pruned_mass();
        truncation_loss = truncation_loss.max(lost);
        let step = (&next - &c).weighted_norm(w);
        let step_f = step.upper();
        if let Some(&prev) = residuals.last() {
            rates.push(if prev > 0.0 { step_f / prev } else { 0.0 });
            streak = if step_f > prev { streak + 1 } else { 0 };
        }
        residuals.push(step_f);
        if !step_f.is_finite() {
            return Err(Error::Divergence(streak));
        }
        let done = step_f < control.tol;
        if done || residuals.len() >= control.max_iter {
            let hamiltonian = table.renormalized_hamiltonian();
            let empty_y_mass = c
                .terms()
                .filter(|(k, _)| k.y.is_empty())
                .map(|(k, v)| v.magnitude() * w.factor::<f64>(k.x.len(), 0))
                .sum();
            return Ok(FixedPointResult {
                single_flip_norm: hamiltonian.single_flip_norm(),
                c_star: c,
                residual: step,
                iterations: residuals.len(),
                converged: done,
                residual_history: residuals,
                rate_history: rates,
                hamiltonian,
                truncation_loss,
                empty_y_mass,
                hamiltonian_range: range,
                hamiltonian_tail: hat_tail,
            });
        }
        if streak >= DIVERGENCE_STREAK {
            return Err(Error::Divergence(streak));
        }
        c = next;
    }
}

/// Cost of flipping one block spin in the converged `H′`, counting each
/// class once per site it contains.
pub fn flip_cost<S: Scalar>(result: &FixedPointResult<S>) -> S {
    result.hamiltonian.single_flip_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::decimation_seed;
    use crate::spin_algebra::SiteSet;

    #[test]
    fn decimation_converges_immediately() {
        let g = 1.5;
        let seed = decimation_seed(g).unwrap();
        let spec = HamiltonianSpec::new(g, 0.0, 2.0).unwrap();
        let w = NormWeights::mu(1.0).unwrap();
        let r = iterate::<f64>(
            &seed,
            &spec,
            &BlockKernel::decimation(),
            &TruncationPolicy::default(),
            &w,
            &IterationControl::default(),
            &AlgebraConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.residual < 1e-14);
        let want = 0.5 * libm::log(libm::cosh(2.0 * g));
        assert!((r.hamiltonian.get(&[-1, 0]) - want).abs() < 1e-13);
        assert!((flip_cost(&r) - 2.0 * want).abs() < 1e-13);
    }

    #[test]
    fn policy_drops_out_of_window_terms() {
        let p = TruncationPolicy::default();
        let mut c = SpinPolynomial::from_terms([
            (SiteSet::singleton(0), SiteSet::singleton(-1), 1.0),
            (SiteSet::singleton(0), SiteSet::singleton(-9), 0.5),
            (SiteSet::singleton(0), SiteSet::singleton(-2), 1e-13),
        ])
        .unwrap();
        let lost = p.apply(&mut c, &NormWeights::unweighted());
        assert_eq!(c.len(), 1);
        assert!((lost - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oversized_windows_are_rejected() {
        let p = TruncationPolicy {
            window_sigma: 20,
            ..TruncationPolicy::default()
        };
        assert!(matches!(
            p.validate(&AlgebraConfig::default()),
            Err(Error::SupportCap { .. })
        ));
    }
}
