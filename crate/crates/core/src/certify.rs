//! Approximate fixed points for the two kernels and the contraction
//! certificate for `F(c + Ĥ) = c`.

use crate::error::{Error, Result};
use crate::rg_map::{
    contraction_diagnostic, long_range_norm, nearest_neighbor_hat, rg_f, rho, rho_inverse,
    HamiltonianSpec, KernelId,
};
use crate::scalar::{Mode, Scalar};
use crate::spin_algebra::{AlgebraConfig, NormWeights, SiteSet, SpinPolynomial};

/// Grid size of the radius search before golden-section refinement.
pub const RADIUS_GRID: usize = 1024;

const MAJORITY_SOLVE_CAP: usize = 10_000;

/// An approximate fixed point `c₀` together with the parameters that
/// produced it.
#[derive(Debug, Clone)]
pub struct SeedPoint {
    pub kernel: KernelId,
    pub gamma: f64,
    /// Majority-rule offsets; zero for decimation.
    pub a: f64,
    pub b: f64,
    pub c0: SpinPolynomial<f64>,
}

impl SeedPoint {
    pub fn c0_as<S: Scalar>(&self) -> SpinPolynomial<S> {
        self.c0.map_coefficients(S::from_f64)
    }
}

/// `c₀ = γ σ₀ s₋₁`, the exact fixed point of the decimation kernel at `ε = 0`.
pub fn decimation_seed(gamma: f64) -> Result<SeedPoint> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter("gamma must be positive"));
    }
    let c0 = SpinPolynomial::from_terms([(SiteSet::singleton(0), SiteSet::singleton(-1), gamma)])?;
    Ok(SeedPoint {
        kernel: KernelId::Decimation,
        gamma,
        a: 0.0,
        b: 0.0,
        c0,
    })
}

/// `c₀ = (γ + a) σ₀ s₋₁ + b σ₀ s₋₂`.
pub fn majority_seed(gamma: f64, a: f64, b: f64) -> Result<SeedPoint> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter("gamma must be positive"));
    }
    let c0 = SpinPolynomial::from_terms([
        (SiteSet::singleton(0), SiteSet::singleton(-1), gamma + a),
        (SiteSet::singleton(0), SiteSet::singleton(-2), b),
    ])?;
    Ok(SeedPoint {
        kernel: KernelId::Majority,
        gamma,
        a,
        b,
        c0,
    })
}

/// The seed used for `kernel` at coupling `γ`; for the majority rule the
/// offsets solve the large-`γ` seed equations.
pub fn default_seed(kernel: KernelId, gamma: f64) -> Result<SeedPoint> {
    match kernel {
        KernelId::Decimation => decimation_seed(gamma),
        KernelId::Majority => {
            let (a, b) = majority_seed_solve(1e-14)?;
            majority_seed(gamma, a, b)
        }
    }
}

/// Right-hand sides of the large-`γ` majority-rule seed equations at
/// `(a, b)`, and the leftover couplings `e` (of `σ₀s₋₃`) and `f`
/// (of `σ₀s₋₁s₋₂s₋₃`) they generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorityRhs {
    pub a: f64,
    pub b: f64,
    pub e: f64,
    pub f: f64,
}

pub fn majority_rhs(a: f64, b: f64) -> MajorityRhs {
    use libm::{exp, log};
    let x = log(exp(-a + b) + 0.5 * exp(a - b));
    let y = log(1.5 * exp(-a + b) + 0.5 * exp(a - b));
    let z = log(exp(-a - b) + 0.5 * exp(a + b));
    let w = log(1.5 * exp(-a - b) + 0.5 * exp(a + b));
    let l = 2.0 * log(1.5);
    MajorityRhs {
        a: (-l + x - y + z - w) / 8.0,
        b: (-l - x + y - z + w) / 8.0,
        e: (x - y - z + w) / 8.0,
        f: (-x + y + z - w) / 8.0,
    }
}

fn seed_residual(a: f64, b: f64) -> (f64, f64) {
    let r = majority_rhs(a, b);
    (a - r.a, b - r.b)
}

/// Solves the majority-rule seed equations for `(a₀, b₀)` by plain
/// fixed-point iteration, switching to Newton steps if that stalls.
pub fn majority_seed_solve(tolerance: f64) -> Result<(f64, f64)> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let done = |a: f64, b: f64| {
        let (ra, rb) = seed_residual(a, b);
        ra.abs().max(rb.abs()) < tolerance
    };
    let (mut a, mut b) = (0.0, 0.0);
    for _ in 0..MAJORITY_SOLVE_CAP / 2 {
        if done(a, b) {
            return Ok((a, b));
        }
        let r = majority_rhs(a, b);
        let (na, nb) = (r.a, r.b);
        if !(na.is_finite() && nb.is_finite()) {
            break;
        }
        a = na;
        b = nb;
    }
    for _ in 0..MAJORITY_SOLVE_CAP / 2 {
        if done(a, b) {
            return Ok((a, b));
        }
        let h = 1e-7;
        let (r0a, r0b) = seed_residual(a, b);
        let (raa, rba) = seed_residual(a + h, b);
        let (rab, rbb) = seed_residual(a, b + h);
        let j = [
            [(raa - r0a) / h, (rab - r0a) / h],
            [(rba - r0b) / h, (rbb - r0b) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        a -= (j[1][1] * r0a - j[0][1] * r0b) / det;
        b -= (-j[1][0] * r0a + j[0][0] * r0b) / det;
    }
    if done(a, b) {
        return Ok((a, b));
    }
    Err(Error::NoConvergence {
        what: "majority seed equations",
        iterations: MAJORITY_SOLVE_CAP,
    })
}

/// Why a certificate failed before the radius search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateNote {
    /// `𝒟(c₀ + Ĥ₀) ≥ 1`.
    NotContracting,
    /// `r_max ≤ 0`: `h` alone already exhausts the contraction margin.
    EmptyRadiusRange,
}

impl CertificateNote {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateNote::NotContracting => "contraction diagnostic is not below one",
            CertificateNote::EmptyRadiusRange => "no admissible radius: r_max <= 0",
        }
    }
}

/// Inputs and verdict of the existence test
/// `inf_r (‖F(c₀+Ĥ₀) - c₀‖ + h) / (r [1 - 𝒟(c₀+Ĥ₀) - ρ(r+h)]) < 1`.
#[derive(Debug, Clone)]
pub struct Certificate<S> {
    pub kernel: KernelId,
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
    pub weights: NormWeights,
    pub mode: Mode,
    pub d0: S,
    pub d0_components: [S; 3],
    pub residual: S,
    /// `‖Ĥ - Ĥ₀‖` including the `e^{2μ}` weight of pair terms.
    pub h: S,
    /// The same tail without the pair weight, `ε c(α)`.
    pub h_unweighted: S,
    pub r_max: S,
    pub r_star: f64,
    pub objective: S,
    pub pass: bool,
    pub note: Option<CertificateNote>,
}

/// Scalar part of a certificate: everything after `𝒟₀`, the residual and
/// `h` are known.
#[derive(Debug, Clone, Copy)]
pub struct RadiusSearch<S> {
    pub r_max: S,
    pub r_star: f64,
    pub objective: S,
    pub pass: bool,
    pub note: Option<CertificateNote>,
}

fn objective_at<S: Scalar>(d0: S, residual: S, h: S, r: S) -> Option<S> {
    let bracket = S::one() - d0 - rho(r + h).ok()?;
    if bracket.lower() <= 0.0 {
        return None;
    }
    Some((residual + h) / (r * bracket))
}

fn objective_f64(d0: f64, residual: f64, h: f64, r: f64) -> f64 {
    objective_at(d0, residual, h, r).unwrap_or(f64::INFINITY)
}

/// Minimizes the objective over `0 < r < r_max` on a grid of
/// [`RADIUS_GRID`] points refined by golden-section search, then evaluates
/// the objective enclosure at the chosen radius.
pub fn radius_search<S: Scalar>(d0: S, residual: S, h: S) -> RadiusSearch<S> {
    let inf = S::from_f64(f64::INFINITY);
    let y = S::one() - d0;
    if d0.upper() >= 1.0 || !(d0.upper().is_finite()) {
        return RadiusSearch {
            r_max: S::zero(),
            r_star: 0.0,
            objective: inf,
            pass: false,
            note: Some(CertificateNote::NotContracting),
        };
    }
    let r_max = rho_inverse(y) - h;
    if r_max.lower() <= 0.0 {
        return RadiusSearch {
            r_max,
            r_star: 0.0,
            objective: inf,
            pass: false,
            note: Some(CertificateNote::EmptyRadiusRange),
        };
    }
    let (fd, fr, fh) = (d0.mid(), residual.mid(), h.mid());
    let top = r_max.lower();
    let obj = |r: f64| objective_f64(fd, fr, fh, r);
    let mut best = 1;
    let mut best_val = f64::INFINITY;
    for i in 1..RADIUS_GRID {
        let v = obj(top * i as f64 / RADIUS_GRID as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut lo = top * (best - 1) as f64 / RADIUS_GRID as f64;
    let mut hi = top * (best + 1) as f64 / RADIUS_GRID as f64;
    let mut r_star = top * best as f64 / RADIUS_GRID as f64;
    if fr + fh > 0.0 {
        let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (obj(x1), obj(x2));
        for _ in 0..200 {
            if hi - lo <= 1e-15 * top {
                break;
            }
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = obj(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = obj(x2);
            }
        }
        let cand = 0.5 * (lo + hi);
        if cand > 0.0 && obj(cand) <= best_val {
            r_star = cand;
        }
    }
    let objective = objective_at(d0, residual, h, S::from_f64(r_star)).unwrap_or(inf);
    RadiusSearch {
        r_max,
        r_star,
        objective,
        pass: objective.upper() < 1.0 && d0.upper() < 1.0,
        note: None,
    }
}

/// The `ε`-independent part of a certificate: `𝒟(c₀ + Ĥ₀)` and
/// `‖F(c₀ + Ĥ₀) - c₀‖`.
#[derive(Debug, Clone)]
pub struct SeedDiagnostics<S> {
    pub d0: S,
    pub d0_components: [S; 3],
    pub residual: S,
    pub f_minus_c0: SpinPolynomial<S>,
}

fn effective_config<S: Scalar>(cfg: &AlgebraConfig, w: &NormWeights) -> AlgebraConfig {
    let mut cfg = cfg.with_weights(*w);
    if S::MODE == Mode::Interval {
        cfg.prune_tol = 0.0;
    }
    cfg
}

pub fn seed_diagnostics<S: Scalar>(
    seed: &SeedPoint,
    gamma: f64,
    w: &NormWeights,
    cfg: &AlgebraConfig,
) -> Result<SeedDiagnostics<S>> {
    let cfg = effective_config::<S>(cfg, w);
    let kernel = seed.kernel.kernel::<S>();
    let c0 = seed.c0_as::<S>();
    let input = &c0 + &nearest_neighbor_hat::<S>(gamma);
    let d = contraction_diagnostic(&input, &kernel, w, &cfg)?;
    let f = rg_f(&input, &kernel, &cfg)?;
    let diff = &f - &c0;
    let residual = diff.weighted_norm(w) + S::from_f64(f.pruned_mass());
    Ok(SeedDiagnostics {
        d0: d.value,
        d0_components: d.components,
        residual,
        f_minus_c0: diff,
    })
}

/// Evaluates the existence test for `F(c + Ĥ) = c` around `seed`, with
/// `Ĥ₀` the nearest-neighbor part and `h = ε e^{2μ} c(α)`.
pub fn theorem_certificate<S: Scalar>(
    seed: &SeedPoint,
    spec: &HamiltonianSpec,
    w: &NormWeights,
    cfg: &AlgebraConfig,
) -> Result<Certificate<S>> {
    let diag = seed_diagnostics::<S>(seed, spec.gamma, w, cfg)?;
    certificate_from_diagnostics(seed, spec, w, &diag)
}

pub fn certificate_from_diagnostics<S: Scalar>(
    seed: &SeedPoint,
    spec: &HamiltonianSpec,
    w: &NormWeights,
    diag: &SeedDiagnostics<S>,
) -> Result<Certificate<S>> {
    let (h, h_plain) = long_range_norm(spec, w)?;
    let h = S::from_enclosure(h);
    let search = radius_search(diag.d0, diag.residual, h);
    Ok(Certificate {
        kernel: seed.kernel,
        gamma: spec.gamma,
        eps: spec.eps,
        alpha: spec.alpha,
        weights: *w,
        mode: S::MODE,
        d0: diag.d0,
        d0_components: diag.d0_components,
        residual: diag.residual,
        h,
        h_unweighted: S::from_enclosure(h_plain),
        r_max: search.r_max,
        r_star: search.r_star,
        objective: search.objective,
        pass: search.pass,
        note: search.note,
    })
}

/// Largest `ε` found by bisection at which the certificate passes.
#[derive(Debug, Clone)]
pub struct EpsilonThreshold<S> {
    pub eps: f64,
    /// First tested `ε` known to fail.
    pub eps_fail: f64,
    pub bisection_steps: usize,
    /// The certificate at `eps`.
    pub certificate: Certificate<S>,
}

/// Bisection on `ε` to relative width `rel_tol`. Only `h` depends on `ε`,
/// so `𝒟₀` and the residual are computed once.
pub fn epsilon_threshold<S: Scalar>(
    seed: &SeedPoint,
    alpha: f64,
    w: &NormWeights,
    cfg: &AlgebraConfig,
    rel_tol: f64,
) -> Result<EpsilonThreshold<S>> {
    let base = HamiltonianSpec::new(seed.gamma, 0.0, alpha)?;
    let diag = seed_diagnostics::<S>(seed, seed.gamma, w, cfg)?;
    let at = |eps: f64| -> Result<Certificate<S>> {
        let spec = HamiltonianSpec { eps, ..base.clone() };
        certificate_from_diagnostics(seed, &spec, w, &diag)
    };
    let zero = at(0.0)?;
    if !zero.pass {
        return Ok(EpsilonThreshold {
            eps: 0.0,
            eps_fail: 0.0,
            bisection_steps: 0,
            certificate: zero,
        });
    }
    // past h = ρ⁻¹(1 - 𝒟₀) no radius is admissible
    let unit = long_range_norm(&HamiltonianSpec { eps: 1.0, ..base.clone() }, w)?.0;
    let margin = rho_inverse(S::one() - diag.d0).upper();
    let mut hi = margin / unit.lower() * (1.0 + 1e-9);
    let mut lo = 0.0;
    let mut best = zero;
    let mut steps = 0;
    while hi - lo > rel_tol * hi && steps < 200 {
        let mid = 0.5 * (lo + hi);
        let c = at(mid)?;
        if c.pass {
            lo = mid;
            best = c;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(EpsilonThreshold {
        eps: lo,
        eps_fail: hi,
        bisection_steps: steps,
        certificate: best,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_solution_is_a_fixed_point() {
        let (a, b) = majority_seed_solve(1e-13).unwrap();
        let r = majority_rhs(a, b);
        assert!((r.a - a).abs() < 1e-13 && (r.b - b).abs() < 1e-13);
        assert!((r.e + r.f).abs() < 1e-15);
    }

    #[test]
    fn decimation_seed_norm() {
        let s = decimation_seed(1.0).unwrap();
        let w = NormWeights::mu(1.0).unwrap();
        assert!((s.c0.weighted_norm(&w) - 1f64.exp() * 1.0).abs() < 1e-15);
        assert!(decimation_seed(0.0).is_err());
    }

    #[test]
    fn decimation_certificate_is_trivial() {
        let seed = decimation_seed(2.0).unwrap();
        let spec = HamiltonianSpec::new(2.0, 0.0, 2.0).unwrap();
        let w = NormWeights::mu(1.0).unwrap();
        let c = theorem_certificate::<f64>(&seed, &spec, &w, &AlgebraConfig::default()).unwrap();
        assert!(c.pass);
        assert!(c.residual < 1e-12);
        assert!(c.objective < 1e-10);
    }

    #[test]
    fn non_contracting_diagnostic_fails_immediately() {
        let s = radius_search(1.2f64, 0.01, 0.0);
        assert!(!s.pass);
        assert_eq!(s.note, Some(CertificateNote::NotContracting));
    }

    #[test]
    fn radius_search_finds_interior_minimum() {
        let s = radius_search(0.5f64, 0.01, 0.0);
        assert!(s.pass);
        let v = s.objective;
        for r in [0.5 * s.r_star, 0.9 * s.r_star, 1.1 * s.r_star] {
            assert!(objective_f64(0.5, 0.01, 0.0, r) >= v - 1e-15);
        }
    }
}
