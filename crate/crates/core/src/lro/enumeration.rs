//! Exact enumeration of the ring model: two-point functions, the infrared
//! bound and Gaussian domination.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::torus::TorusModel;
use crate::error::{Error, Result};

/// Largest ring (in sites) summed over configuration by configuration.
pub const ENUMERATION_CAP: usize = 20;

/// Slack allowed in the Gaussian domination and infrared comparisons.
pub const DOMINATION_SLACK: f64 = 1e-12;

fn check_cap(model: &TorusModel) -> Result<()> {
    let n = model.sites();
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            sites: n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// `(i, j, K_ij)` for all `i < j` with `K = (γ - ε)N + εJ`.
fn pairs(model: &TorusModel) -> Vec<(usize, usize, f64)> {
    let n = model.sites();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j, model.pair_coupling(j as i64 - i as i64)));
        }
    }
    out
}

#[inline]
fn spin(config: u32, i: usize) -> f64 {
    if config >> i & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Translation-averaged correlations `C(d) = (1/2m) Σ_i ⟨σ_i σ_{i+d}⟩` under
/// the weight `exp(scale · Σ_{i<j} K_ij σ_i σ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPoint {
    m: usize,
    scale: f64,
    correlation: Vec<f64>,
}

impl TwoPoint {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn correlation(&self, d: usize) -> f64 {
        self.correlation[d % self.correlation.len()]
    }

    /// `g(p_k) = ⟨σ̂_p σ̂_{-p}⟩ = Σ_d cos(p_k d) C(d)`.
    pub fn g(&self, k: usize) -> f64 {
        let len = self.correlation.len();
        self.correlation
            .iter()
            .enumerate()
            .map(|(d, c)| libm::cos(PI * ((k * d) % len) as f64 / self.m as f64) * c)
            .sum()
    }
}

/// Exact two-point function. `scale = 1` is the Gibbs weight `e^{-H}`; the
/// measure inside the Gaussian domination functional has `scale = 2`.
pub fn two_point(model: &TorusModel, scale: f64) -> Result<TwoPoint> {
    check_cap(model)?;
    let n = model.sites();
    let pairs = pairs(model);
    let states = 1u32 << n;
    let energy: Vec<f64> = (0..states)
        .map(|c| {
            scale
                * pairs
                    .iter()
                    .map(|&(i, j, k)| k * spin(c, i) * spin(c, j))
                    .sum::<f64>()
        })
        .collect();
    let top = energy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let mut corr = alloc::vec![0.0; n];
    for (c, e) in energy.iter().enumerate() {
        let w = libm::exp(e - top);
        z += w;
        let c = c as u32;
        for (d, slot) in corr.iter_mut().enumerate() {
            let s: f64 = (0..n).map(|i| spin(c, i) * spin(c, (i + d) % n)).sum();
            *slot += w * s;
        }
    }
    for slot in corr.iter_mut() {
        *slot /= z * n as f64;
    }
    Ok(TwoPoint {
        m: model.m(),
        scale,
        correlation: corr,
    })
}

/// One row of [`infrared_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfraredRow {
    pub k: usize,
    pub p: f64,
    pub g: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares the exact `g(p)` with `1/(2E(p))` at every `p ≠ 0`.
pub fn infrared_check(model: &TorusModel) -> Result<Vec<InfraredRow>> {
    let tp = two_point(model, 1.0)?;
    Ok((1..model.sites())
        .map(|k| {
            let g = tp.g(k);
            let bound = 0.5 / model.dispersion_e(k);
            InfraredRow {
                k,
                p: model.couplings().momentum(k),
                g,
                bound,
                holds: g <= bound * (1.0 + DOMINATION_SLACK),
            }
        })
        .collect())
}

/// `ln Z(h)` with `Z(h) = 2^{-2m} Σ_σ exp(-½ Σ_{j,k} K_jk (σ_j - σ_k - h_j + h_k)²)`,
/// `h` indexed by storage position `0..2m`.
pub fn log_partition_shifted(model: &TorusModel, h: &[f64]) -> Result<f64> {
    check_cap(model)?;
    let n = model.sites();
    if h.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: h.len(),
        });
    }
    let pairs = pairs(model);
    let states = 1u32 << n;
    let exponent: Vec<f64> = (0..states)
        .map(|c| {
            // ordered sum over (j, k) is twice the sum over pairs
            -pairs
                .iter()
                .map(|&(i, j, k)| {
                    let t = spin(c, i) - spin(c, j) - h[i] + h[j];
                    k * t * t
                })
                .sum::<f64>()
        })
        .collect();
    let top = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = exponent.iter().map(|e| libm::exp(e - top)).sum();
    Ok(top + libm::log(s) - n as f64 * core::f64::consts::LN_2)
}

/// `Z(h) ≤ Z(0)(1 + 10⁻¹²)` by exact enumeration.
pub fn gaussian_domination_check(model: &TorusModel, h: &[f64]) -> Result<bool> {
    let zh = log_partition_shifted(model, h)?;
    let z0 = log_partition_shifted(model, &alloc::vec![0.0; model.sites()])?;
    Ok(zh - z0 <= libm::log1p(DOMINATION_SLACK))
}

/// Second-order behaviour of `Z(δ cos(p·))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrder {
    pub k: usize,
    /// Richardson-extrapolated `(Z(δh)/Z(0) - 1)/δ²`.
    pub finite_difference: f64,
    /// `m λ (2 λ g(p) - 1)` with `λ = 2E(p)` and `g` measured under the
    /// doubled weight of `Z`.
    pub predicted: f64,
}

/// Expands `Z(δ cos(p_k j))` to second order and compares with the
/// prediction from the two-point function; needs `p_k ∉ {0, π}`.
pub fn second_order_check(model: &TorusModel, k: usize, delta: f64) -> Result<SecondOrder> {
    let m = model.m();
    if k % m == 0 {
        return Err(Error::InvalidParameter(
            "second-order check needs p not in {0, pi}",
        ));
    }
    let n = model.sites();
    let profile = |scale: f64| -> Vec<f64> {
        (0..n)
            .map(|i| scale * libm::cos(model.couplings().momentum(k) * model.site_label(i) as f64))
            .collect()
    };
    let z0 = log_partition_shifted(model, &alloc::vec![0.0; n])?;
    let quotient = |d: f64| -> Result<f64> {
        let zh = log_partition_shifted(model, &profile(d))?;
        Ok(libm::expm1(zh - z0) / (d * d))
    };
    // Z is even in δ, so the error of the quotient is O(δ²)
    let coarse = quotient(delta)?;
    let fine = quotient(0.5 * delta)?;
    let finite_difference = (4.0 * fine - coarse) / 3.0;
    let lambda = 2.0 * model.dispersion_e(k);
    let g = two_point(model, 2.0)?.g(k);
    Ok(SecondOrder {
        k,
        finite_difference,
        predicted: m as f64 * lambda * (2.0 * lambda * g - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infrared_bound_reference_instance() {
        let model = TorusModel::new(3, 0.5, 0.2, 1.5).unwrap();
        let rows = infrared_check(&model).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
    }

    #[test]
    fn correlations_sum_rule() {
        // Σ_k g(p_k) = 2m C(0) = 2m
        let model = TorusModel::new(3, 0.9, 0.4, 1.3).unwrap();
        let tp = two_point(&model, 1.0).unwrap();
        assert!((tp.correlation(0) - 1.0).abs() < 1e-14);
        let total: f64 = (0..6).map(|k| tp.g(k)).sum();
        assert!((total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_shift_leaves_z_unchanged() {
        let model = TorusModel::new(3, 0.7, 0.3, 1.5).unwrap();
        let a = log_partition_shifted(&model, &[0.0; 6]).unwrap();
        let b = log_partition_shifted(&model, &[0.37; 6]).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(gaussian_domination_check(&model, &[0.37; 6]).unwrap());
    }

    #[test]
    fn decoupled_ring_has_unit_z() {
        let model = TorusModel::new(2, 0.0, 0.0, 1.5).unwrap();
        let z = log_partition_shifted(&model, &[0.1, -0.4, 0.3, 2.0]).unwrap();
        assert!(z.abs() < 1e-15);
    }

    #[test]
    fn enumeration_cap() {
        let model = TorusModel::new(11, 1.0, 0.1, 1.5).unwrap();
        assert!(matches!(
            two_point(&model, 1.0),
            Err(Error::EnumerationCap { sites: 22, .. })
        ));
    }

    #[test]
    fn second_order_matches_two_point() {
        let model = TorusModel::new(3, 0.7, 0.3, 1.5).unwrap();
        for k in [1, 2, 4, 5] {
            let s = second_order_check(&model, k, 1e-2).unwrap();
            assert!(
                (s.finite_difference - s.predicted).abs() < 1e-6 * s.predicted.abs().max(1.0),
                "{s:?}"
            );
            assert!(s.predicted <= 0.0);
        }
    }
}
