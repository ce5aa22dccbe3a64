//! Strategies and property bodies shared by the proptest suites and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use rgstep_core::certify::{default_seed, theorem_certificate};
use rgstep_core::rg_map::{
    block_expectations, contraction_diagnostic, nearest_neighbor_hat, rg_f, rho, BlockKernel,
    HamiltonianSpec, KernelId,
};
use rgstep_core::spin_algebra::{AlgebraConfig, NormWeights, SiteSet, SpinPolynomial, TermKey};
use rgstep_core::Interval;

pub fn sites_from_mask(mask: u32, first: i32) -> SiteSet {
    SiteSet::new((0..32).filter(|b| mask >> b & 1 == 1).map(|b| first + b)).unwrap()
}

/// Polynomials with `X ⊂ [-3, 4]`, `Y ⊂ [-3, 1]`.
pub fn free_poly() -> impl Strategy<Value = SpinPolynomial<f64>> {
    prop::collection::vec((0u32..256, 0u32..32, -3.0..3.0f64), 0..7).prop_map(|terms| {
        SpinPolynomial::from_terms(
            terms
                .into_iter()
                .map(|(x, y, c)| (sites_from_mask(x, -3), sites_from_mask(y, -3), c)),
        )
        .unwrap()
    })
}

/// Boundary-class polynomials: `X ⊂ {0..3}` meeting `{0, 1}`, `Y ⊂ {-3..-1}`.
pub fn boundary_poly(scale: f64, max_terms: usize) -> impl Strategy<Value = SpinPolynomial<f64>> {
    prop::collection::vec((1u32..16, 0u32..8, -1.0..1.0f64), 0..=max_terms).prop_map(
        move |terms| {
            SpinPolynomial::from_terms(terms.into_iter().filter(|t| t.0 & 3 != 0).map(
                |(x, y, c)| (sites_from_mask(x, 0), sites_from_mask(y, -3), scale * c),
            ))
            .unwrap()
        },
    )
}

pub fn kernel_id() -> impl Strategy<Value = KernelId> {
    prop_oneof![Just(KernelId::Decimation), Just(KernelId::Majority)]
}

pub fn weights() -> impl Strategy<Value = NormWeights> {
    (0.0..2.0f64, 0.0..2.0f64).prop_map(|(mu, nu)| NormWeights::new(mu, nu).unwrap())
}

/// Seed input `c₀ + Ĥ₀` for a kernel at strong coupling.
pub fn seed_input(kernel: KernelId, gamma: f64) -> SpinPolynomial<f64> {
    let seed = default_seed(kernel, gamma).unwrap();
    &seed.c0 + &nearest_neighbor_hat(gamma)
}

/// All spin assignments on the sites of the given polynomials.
pub fn assignment(
    polys: &[&SpinPolynomial<f64>],
    extra_sigma: &[i32],
    extra_block: &[i32],
    bits: u64,
) -> (BTreeMap<i32, i8>, BTreeMap<i32, i8>) {
    let mut sig: Vec<i32> = extra_sigma.to_vec();
    let mut blk: Vec<i32> = extra_block.to_vec();
    for p in polys {
        for (k, _) in p.terms() {
            sig.extend(k.x.iter());
            blk.extend(k.y.iter());
        }
    }
    sig.sort_unstable();
    sig.dedup();
    blk.sort_unstable();
    blk.dedup();
    let mut i = 0;
    let mut spin = || {
        let s = if bits >> (i % 64) & 1 == 1 { -1 } else { 1 };
        i += 1;
        s
    };
    let sigma = sig.into_iter().map(|s| (s, spin())).collect();
    let block = blk.into_iter().map(|s| (s, spin())).collect();
    (sigma, block)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// `‖fg‖ ≤ ‖f‖ ‖g‖`, with the product checked pointwise.
pub fn banach_algebra(
    f: &SpinPolynomial<f64>,
    g: &SpinPolynomial<f64>,
    w: &NormWeights,
    bits: u64,
) -> Result<(), TestCaseError> {
    let fg = f.multiply(g, &AlgebraConfig::exact()).unwrap();
    let lhs = fg.weighted_norm(w);
    let rhs = f.weighted_norm(w) * g.weighted_norm(w);
    prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    let (s, b) = assignment(&[f, g], &[], &[], bits);
    let direct = f.evaluate(&s, &b).unwrap() * g.evaluate(&s, &b).unwrap();
    let product = fg.evaluate(&s, &b).unwrap();
    prop_assert!(rel_close(direct, product, 1e-12), "{direct} vs {product}");
    Ok(())
}

/// Coefficients → values → coefficients is the identity, and values agree
/// with pointwise evaluation.
pub fn transform_roundtrip(f: &SpinPolynomial<f64>, bits: u64) -> Result<(), TestCaseError> {
    let support = f.support();
    let values = f.values_on(&support).unwrap();
    let back =
        SpinPolynomial::coefficients_from_values(values.clone(), &support, &AlgebraConfig::exact())
            .unwrap();
    for (k, v) in f.terms() {
        let got = back.get(k).unwrap_or(0.0);
        prop_assert!((got - v).abs() <= 1e-12 * (1.0 + v.abs()), "{k:?}: {got} vs {v}");
    }
    let spurious: f64 = back
        .terms()
        .filter(|(k, _)| f.get(k).is_none())
        .map(|(_, v)| v.abs())
        .sum();
    prop_assert!(spurious <= 1e-12, "spurious mass {spurious}");
    if !values.is_empty() {
        let idx = (bits as usize) % values.len();
        let mut sigma = BTreeMap::new();
        let mut block = BTreeMap::new();
        for (i, &s) in support.sigma_sites().iter().enumerate() {
            sigma.insert(s, if idx >> i & 1 == 1 { -1 } else { 1 });
        }
        let off = support.sigma_sites().len();
        for (j, &s) in support.block_sites().iter().enumerate() {
            block.insert(s, if idx >> (off + j) & 1 == 1 { -1 } else { 1 });
        }
        let direct = f.evaluate(&sigma, &block).unwrap();
        prop_assert!(rel_close(direct, values[idx], 1e-12));
    }
    Ok(())
}

/// `⟨g⟩_c` by linearity from the three block expectations.
pub fn expectation_by_linearity(
    g: &SpinPolynomial<f64>,
    exps: &[SpinPolynomial<f64>; 3],
) -> SpinPolynomial<f64> {
    let cfg = AlgebraConfig::exact();
    let mut out = SpinPolynomial::zero();
    for (k, &v) in g.terms() {
        let a = (k.x.contains(0), k.x.contains(1));
        let rest = SpinPolynomial::monomial(
            SiteSet::new(k.x.iter().filter(|&s| s != 0 && s != 1)).unwrap(),
            k.y.clone(),
            v,
        );
        let term = match a {
            (false, false) => rest,
            (true, false) => rest.multiply(&exps[0], &cfg).unwrap(),
            (false, true) => rest.multiply(&exps[1], &cfg).unwrap(),
            (true, true) => rest.multiply(&exps[2], &cfg).unwrap(),
        };
        out = &out + &term;
    }
    out
}

/// `⟨g⟩_c` at one external configuration by summing the block spins.
pub fn expectation_direct(
    g: &SpinPolynomial<f64>,
    c: &SpinPolynomial<f64>,
    kernel: &BlockKernel<f64>,
    sigma: &BTreeMap<i32, i8>,
    block: &BTreeMap<i32, i8>,
) -> f64 {
    let mut sigma = sigma.clone();
    let s0 = block[&0];
    let mut weights = Vec::new();
    let mut num = 0.0;
    for (s0b, s1b) in [(1i8, 1i8), (-1, 1), (1, -1), (-1, -1)] {
        sigma.insert(0, s0b);
        sigma.insert(1, s1b);
        let k = kernel.get(s0b, s1b, s0);
        let e = c.evaluate(&sigma, block).unwrap();
        weights.push((k, e, g.evaluate(&sigma, block).unwrap()));
    }
    let top = weights.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let mut den = 0.0;
    for (k, e, gv) in weights {
        let w = k * (e - top).exp();
        den += w;
        num += w * gv;
    }
    num / den
}

/// `g` with `X ⊂ {0..4}`, `Y ⊂ {-2..0}`.
pub fn observable() -> impl Strategy<Value = SpinPolynomial<f64>> {
    prop::collection::vec((0u32..32, 0u32..8, -2.0..2.0f64), 1..6).prop_map(|terms| {
        SpinPolynomial::from_terms(
            terms
                .into_iter()
                .map(|(x, y, c)| (sites_from_mask(x, 0), sites_from_mask(y, -2), c)),
        )
        .unwrap()
    })
}

/// Strongly coupled input: a seed plus a small boundary perturbation.
pub fn contracting_input() -> impl Strategy<Value = (KernelId, SpinPolynomial<f64>)> {
    (kernel_id(), 4.0..40.0f64, boundary_poly(0.05, 4))
        .prop_map(|(k, gamma, d)| (k, &seed_input(k, gamma) + &d))
}

/// `‖⟨g⟩_c‖ ≤ ‖g‖` when `𝒟(c) < 1`; `⟨g⟩_c` is cross-checked pointwise.
pub fn expectation_contraction(
    kernel: KernelId,
    c: &SpinPolynomial<f64>,
    g: &SpinPolynomial<f64>,
    w: &NormWeights,
    bits: u64,
) -> Result<(), TestCaseError> {
    let cfg = AlgebraConfig::exact();
    let k = kernel.kernel::<f64>();
    let exps = block_expectations(c, &k, &cfg).unwrap();
    let eg = expectation_by_linearity(g, &exps);
    let (sigma, block) = assignment(&[c, g, &eg], &[0, 1], &[0], bits);
    let direct = expectation_direct(g, c, &k, &sigma, &block);
    let via = eg.evaluate(&sigma, &block).unwrap();
    prop_assert!((direct - via).abs() <= 1e-10 * (1.0 + direct.abs()), "{direct} vs {via}");
    let d = contraction_diagnostic(c, &k, w, &cfg).unwrap().value;
    prop_assume!(d < 1.0);
    let lhs = eg.weighted_norm(w);
    let rhs = g.weighted_norm(w);
    prop_assert!(lhs <= rhs * (1.0 + 1e-12), "‖<g>‖ = {lhs} > ‖g‖ = {rhs} at 𝒟 = {d}");
    Ok(())
}

/// Directions `σ(X) s(Y)` of the finite-difference Jacobian.
pub fn jacobian_directions() -> Vec<TermKey> {
    let mut out = Vec::new();
    for x in 1u32..16 {
        if x & 3 == 0 {
            continue;
        }
        for y in 0u32..4 {
            out.push(TermKey::new(sites_from_mask(x, 0), sites_from_mask(y, -2)));
        }
    }
    out
}

/// Column sums of the central-difference Jacobian of `F` are at most
/// `𝒟(c) + 10⁻⁶`. Returns the largest column.
pub fn jacobian_columns(
    kernel: KernelId,
    c: &SpinPolynomial<f64>,
    w: &NormWeights,
) -> Result<f64, TestCaseError> {
    let cfg = AlgebraConfig::exact();
    let k = kernel.kernel::<f64>();
    let d = contraction_diagnostic(c, &k, w, &cfg).unwrap().value;
    let t = 1e-5;
    let mut worst: f64 = 0.0;
    for key in jacobian_directions() {
        let e = SpinPolynomial::monomial(key.x.clone(), key.y.clone(), t);
        let plus = rg_f(&(c + &e), &k, &cfg).unwrap();
        let minus = rg_f(&(c - &e), &k, &cfg).unwrap();
        let col = (&plus - &minus).scale(0.5 / t).weighted_norm(w)
            / w.factor::<f64>(key.x.len(), key.y.len());
        worst = worst.max(col);
        prop_assert!(col <= d + 1e-6, "column {key:?}: {col} > 𝒟 = {d}");
    }
    Ok(worst)
}

/// Lipschitz bound and the `ρ`-continuity of `𝒟` for pairs satisfying
/// `‖c₁ - c₂‖ < ln 2` and `𝒟(cᵢ) + ρ(‖c₁ - c₂‖) ≤ 1`.
pub fn lipschitz(
    kernel: KernelId,
    c1: &SpinPolynomial<f64>,
    c2: &SpinPolynomial<f64>,
    w: &NormWeights,
) -> Result<(), TestCaseError> {
    let cfg = AlgebraConfig::exact();
    let k = kernel.kernel::<f64>();
    let dist = (c1 - c2).weighted_norm(w);
    prop_assume!(dist < std::f64::consts::LN_2);
    let r = rho(dist).unwrap();
    let d1 = contraction_diagnostic(c1, &k, w, &cfg).unwrap().value;
    let d2 = contraction_diagnostic(c2, &k, w, &cfg).unwrap().value;
    prop_assume!(d1 + r <= 1.0 && d2 + r <= 1.0);
    prop_assert!((d1 - d2).abs() <= r + 1e-12, "|𝒟₁ - 𝒟₂| = {} > ρ = {r}", (d1 - d2).abs());
    let f1 = rg_f(c1, &k, &cfg).unwrap();
    let f2 = rg_f(c2, &k, &cfg).unwrap();
    let lhs = (&f1 - &f2).weighted_norm(w);
    prop_assert!(lhs <= dist * (1.0 + 1e-10) + 1e-14, "‖F₁ - F₂‖ = {lhs} > {dist}");
    Ok(())
}

pub fn lipschitz_pair(
) -> impl Strategy<Value = (KernelId, SpinPolynomial<f64>, SpinPolynomial<f64>, NormWeights)> {
    (
        kernel_id(),
        4.0..40.0f64,
        boundary_poly(0.04, 4),
        boundary_poly(0.04, 4),
        0.3..1.5f64,
    )
        .prop_map(|(k, gamma, d1, d2, mu)| {
            let base = seed_input(k, gamma);
            (k, &base + &d1, &base + &d2, NormWeights::mu(mu).unwrap())
        })
}

fn encloses(i: Interval, x: f64) -> bool {
    !x.is_finite() || i.contains(x)
}

/// Every certificate quantity computed in interval arithmetic encloses the
/// float computation.
pub fn interval_encloses_float(
    kernel: KernelId,
    gamma: f64,
    eps: f64,
    alpha: f64,
    w: &NormWeights,
) -> Result<(), TestCaseError> {
    let cfg = AlgebraConfig::exact();
    let seed = default_seed(kernel, gamma).unwrap();
    let spec = HamiltonianSpec::new(gamma, eps, alpha).unwrap();
    let f = theorem_certificate::<f64>(&seed, &spec, w, &cfg).unwrap();
    let i = theorem_certificate::<Interval>(&seed, &spec, w, &cfg).unwrap();
    let pairs = [
        ("𝒟₀", i.d0, f.d0),
        ("𝒟 component 0", i.d0_components[0], f.d0_components[0]),
        ("𝒟 component 1", i.d0_components[1], f.d0_components[1]),
        ("𝒟 component 2", i.d0_components[2], f.d0_components[2]),
        ("residual", i.residual, f.residual),
        ("h", i.h, f.h),
        ("h unweighted", i.h_unweighted, f.h_unweighted),
    ];
    for (name, iv, x) in pairs {
        prop_assert!(encloses(iv, x), "{name}: {iv:?} misses {x}");
    }
    if i.note.is_none() && f.note.is_none() {
        prop_assert!(encloses(i.r_max, f.r_max), "r_max: {:?} misses {}", i.r_max, f.r_max);
        // the interval objective is evaluated at a float minimizer of the
        // midpoint problem; with a zero numerator every radius is optimal
        if f.objective > 0.0 && i.objective.lo() > 0.0 {
            let gap = (i.r_star - f.r_star).abs();
            prop_assert!(gap <= 1e-6 * f.r_max, "{} vs {}", i.r_star, f.r_star);
        }
        prop_assert!(
            encloses(i.objective, f.objective),
            "objective: {:?} misses {}",
            i.objective,
            f.objective
        );
    }
    if i.pass {
        prop_assert!(f.pass, "interval passes but float does not");
    }
    Ok(())
}

pub fn certificate_inputs() -> impl Strategy<Value = (KernelId, f64, f64, f64, NormWeights)> {
    (
        kernel_id(),
        5.0..40.0f64,
        prop_oneof![Just(0.0), 0.0..1e-3f64],
        1.2..3.0f64,
        0.5..1.5f64,
    )
        .prop_map(|(k, g, e, a, mu)| (k, g, e, a, NormWeights::mu(mu).unwrap()))
}
