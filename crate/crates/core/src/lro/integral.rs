//! Power laws and periodic couplings as moments of
//! `μ(dλ) = (-ln λ)^{α-1} / (Γ(α) λ) dλ` on `(0, 1)`.

use super::quadrature::integrate;
use super::torus::periodic_coupling;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Absolute and relative tolerance of the quadratures below.
pub const QUADRATURE_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 20_000;

/// After `λ = e^{-x}` the integrands decay like `e^{-rate·x}`; this cutoff
/// leaves a remainder far below the tolerance.
fn cutoff(rate: f64, alpha: f64) -> f64 {
    (60.0 + 2.0 * alpha * libm::log(1.0 + rate)) / rate
}

fn check(alpha: f64, lower: f64) -> Result<()> {
    if !(alpha > lower) || !alpha.is_finite() {
        return Err(Error::Domain {
            function: "moment measure exponent",
            value: alpha,
        });
    }
    Ok(())
}

/// `(n^{-α}, ∫₀¹ λⁿ μ(dλ))`. With `λ = e^{-x}` and `x = u^{1/α}` the
/// integral becomes `∫ e^{-n u^{1/α}} du / Γ(α+1)`.
pub fn moment_measure_check(n: u32, alpha: f64) -> Result<(f64, f64)> {
    check(alpha, 0.0)?;
    if n == 0 {
        return Err(Error::InvalidParameter("moment index n must be >= 1"));
    }
    let rate = n as f64;
    let s = 1.0 / alpha;
    let u_max = libm::pow(cutoff(rate, alpha), alpha);
    let q = integrate(
        |u| libm::exp(-rate * libm::pow(u, s)),
        0.0,
        u_max,
        QUADRATURE_TOL,
        QUADRATURE_TOL,
        MAX_INTERVALS,
    )?;
    Ok((libm::pow(rate, -alpha), q.value / libm::tgamma(alpha + 1.0)))
}

/// `(J_{j,1-k}, ∫₀¹ [λ^{j+k-1} + λ^{2m-j-k+1}] / (1 - λ^{2m}) μ(dλ))`.
///
/// With `λ = e^{-x}` the integrand behaves like `x^{α-2}` at `x = 0`; the
/// substitution `x = u^q`, `q = 1/(α-1)`, turns that into a bounded one.
pub fn integral_rep_check(j: usize, k: usize, m: usize, alpha: f64) -> Result<(f64, f64)> {
    check(alpha, 1.0)?;
    if j < 1 || k < 1 || j > m || k > m {
        return Err(Error::InvalidParameter("need 1 <= j, k <= m"));
    }
    let a = (j + k - 1) as f64;
    let b = (2 * m + 1 - j - k) as f64;
    let len = (2 * m) as f64;
    let direct = periodic_coupling((j + k - 1) as i64, m, alpha)?.mid();
    let q = 1.0 / (alpha - 1.0);
    let u_max = libm::pow(cutoff(a.min(b), alpha), alpha - 1.0);
    let integrand = |u: f64| {
        let x = libm::pow(u, q);
        // x^{α-1} dx = q u^q du
        q * libm::pow(u, q) * (libm::exp(-a * x) + libm::exp(-b * x)) / -libm::expm1(-len * x)
    };
    let r = integrate(
        integrand,
        0.0,
        u_max,
        QUADRATURE_TOL,
        QUADRATURE_TOL,
        MAX_INTERVALS,
    )?;
    Ok((direct, r.value / libm::tgamma(alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_moment_at_alpha_two() {
        let (p, q) = moment_measure_check(1, 2.0).unwrap();
        assert_eq!(p, 1.0);
        assert!((q - 1.0).abs() < 1e-11, "{q}");
    }

    #[test]
    fn third_moment_at_three_halves() {
        let (p, q) = moment_measure_check(3, 1.5).unwrap();
        assert!((p - 0.19245009).abs() < 1e-8);
        assert!((p - q).abs() < 1e-10, "{p} {q}");
    }

    #[test]
    fn moments_across_exponents() {
        for &alpha in &[0.5, 1.0, 1.2, 1.9, 3.0] {
            for n in [1, 2, 7, 50] {
                let (p, q) = moment_measure_check(n, alpha).unwrap();
                assert!((p - q).abs() <= 1e-10 * p.max(1e-3), "{alpha} {n}: {p} {q}");
            }
        }
    }

    #[test]
    fn integral_representation_reference() {
        let (d, q) = integral_rep_check(2, 3, 5, 1.5).unwrap();
        assert!((d - q).abs() < 1e-8, "{d} {q}");
    }

    #[test]
    fn preconditions() {
        assert!(moment_measure_check(0, 1.5).is_err());
        assert!(integral_rep_check(0, 1, 3, 1.5).is_err());
        assert!(integral_rep_check(1, 4, 3, 1.5).is_err());
        assert!(integral_rep_check(1, 1, 3, 1.0).is_err());
    }
}
