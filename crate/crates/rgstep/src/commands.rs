//! The `certify`, `iterate` and `lro` commands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use rgstep_core::certify::{default_seed, epsilon_threshold, theorem_certificate};
use rgstep_core::fixed_point::iterate;
use rgstep_core::lro::{
    dispersion_e, infrared_check, infrared_sum, integral_rep_check, log_partition_shifted,
    lro_gamma_threshold, regularizer_comparison, regularizer_sum_of, second_order_check,
    spectral_r, TorusCouplings, TorusModel,
};
use rgstep_core::rg_map::{rho, HamiltonianSpec};
use rgstep_core::spin_algebra::AlgebraConfig;
use rgstep_core::{Interval, Mode, Scalar};

use crate::config::RunConfig;
use crate::report::{
    csv_table, CertificateReport, IterateReport, LroThresholdReport, Output, Parameters,
};
use crate::textfmt::{write_polynomial, write_renormalized, TextScalar};
use crate::{CliError, Outcome};

/// Relative width of the `ε` bisection behind `certify --threshold`.
pub const THRESHOLD_REL_TOL: f64 = 1e-6;

/// Largest deviation accepted between the direct and quadrature routes of
/// the integral representation.
pub const INTREP_TOL: f64 = 1e-8;

/// Largest relative gap accepted in the second-order expansion of `Z`.
pub const SECOND_ORDER_TOL: f64 = 1e-6;

fn parameters(cfg: &RunConfig) -> Parameters {
    Parameters {
        kernel: cfg.kernel.to_string(),
        mode: cfg.mode.to_string(),
        gamma: cfg.gamma,
        eps: cfg.eps,
        alpha: cfg.alpha,
        mu: cfg.mu,
        nu: cfg.nu,
    }
}

fn spec(cfg: &RunConfig) -> Result<HamiltonianSpec, CliError> {
    Ok(HamiltonianSpec::new(cfg.gamma, cfg.eps, cfg.alpha)?)
}

pub fn certify(cfg: &RunConfig, threshold: bool, out: &Output) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Float => certify_as::<f64>(cfg, threshold, out),
        Mode::Interval => certify_as::<Interval>(cfg, threshold, out),
    }
}

fn certify_as<S: Scalar>(cfg: &RunConfig, threshold: bool, out: &Output) -> Result<Outcome, CliError> {
    let seed = default_seed(cfg.kernel, cfg.gamma)?;
    let w = cfg.weights();
    let algebra = AlgebraConfig::default();
    let cert = theorem_certificate::<S>(&seed, &spec(cfg)?, &w, &algebra)?;
    let th = if threshold {
        Some(epsilon_threshold::<S>(
            &seed,
            cfg.alpha,
            &w,
            &algebra,
            THRESHOLD_REL_TOL,
        )?)
    } else {
        None
    };
    let report = CertificateReport::new(&seed, &cert, th.as_ref());
    out.json("certificate.json", &report)?;
    eprintln!(
        "certify {} gamma={} eps={} mu={}: D0={:.8} residual={:.8} h={:.3e} objective={:.8} -> {}",
        cfg.kernel,
        cfg.gamma,
        cfg.eps,
        cfg.mu,
        cert.d0.mid(),
        cert.residual.mid(),
        cert.h.mid(),
        cert.objective.mid(),
        report.verdict
    );
    if let Some(t) = &th {
        eprintln!("largest certified eps: {:.6e}", t.eps);
    }
    Ok(Outcome::from_pass(cert.pass))
}

#[derive(Serialize)]
struct ConvergenceRow {
    iteration: usize,
    residual: f64,
    /// Ratio to the previous residual; empty on the first row.
    rate: Option<f64>,
}

pub fn iterate_cmd(cfg: &RunConfig, out: &Output) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Float => iterate_as::<f64>(cfg, out),
        Mode::Interval => iterate_as::<Interval>(cfg, out),
    }
}

fn iterate_as<S: TextScalar>(cfg: &RunConfig, out: &Output) -> Result<Outcome, CliError> {
    let seed = default_seed(cfg.kernel, cfg.gamma)?;
    let spec = spec(cfg)?;
    let w = cfg.weights();
    let algebra = AlgebraConfig::default();
    let result = match iterate::<S>(
        &seed,
        &spec,
        &cfg.kernel.kernel::<S>(),
        &cfg.policy(),
        &w,
        &cfg.control(),
        &algebra,
    ) {
        Ok(r) => r,
        Err(e @ rgstep_core::Error::Divergence(_)) => {
            eprintln!("warning: iteration diverged; eps is likely above the certified range");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<ConvergenceRow> = result
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, &r)| ConvergenceRow {
            iteration: i + 1,
            residual: r,
            rate: (i > 0).then(|| r / result.residual_history[i - 1]),
        })
        .collect();
    out.write("convergence.csv", &csv_table(&rows)?)?;
    out.write("hprime.txt", &write_renormalized(&result.hamiltonian))?;
    out.write("cstar.txt", &write_polynomial(&result.c_star, None))?;

    let cert = theorem_certificate::<S>(&seed, &spec, &w, &algebra)?;
    let rate_bound = if cert.pass {
        let r = S::from_f64(cert.r_star) + cert.h;
        Some((cert.d0 + rho(r)?).upper())
    } else {
        None
    };
    let policy = cfg.policy();
    let report = IterateReport::new(
        parameters(cfg),
        (cfg.tol, cfg.max_iter, policy.window_sigma, policy.window_s),
        &result,
        &cert,
        rate_bound,
    );
    out.json("iterate.json", &report)?;
    eprintln!(
        "iterate {}: {} iterations, residual {:.3e}, converged={}, certificate {}",
        cfg.kernel,
        result.iterations,
        result.residual.mid(),
        result.converged,
        report.certificate
    );
    if !result.converged {
        eprintln!("warning: no convergence within {} iterations", cfg.max_iter);
    }
    if !cert.pass {
        eprintln!("warning: parameters are not covered by the contraction certificate");
    }
    Ok(Outcome::from_pass(result.converged && cert.pass))
}

/// Which exact-enumeration check `lro --check` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LroCheck {
    /// Infrared bound `g(p) ≤ 1/(2E(p))`.
    Ir,
    /// Gaussian domination `Z(h) ≤ Z(0)` for random fields.
    Gd,
    /// Integral representation of the periodic couplings.
    Intrep,
}

#[derive(Debug, Clone)]
pub struct LroArgs {
    pub check: Option<LroCheck>,
    pub m: usize,
    pub regularizer: bool,
    pub m_max: usize,
    pub threshold: bool,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Serialize)]
struct IrRow {
    k: usize,
    p: f64,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "E")]
    e: f64,
    inv_2e: f64,
    g: f64,
    holds: bool,
}

#[derive(Serialize)]
struct GdRow {
    sample: usize,
    log_ratio: f64,
    holds: bool,
}

#[derive(Serialize)]
struct SecondOrderRow {
    k: usize,
    finite_difference: f64,
    predicted: f64,
    rel_gap: f64,
}

#[derive(Serialize)]
struct IntrepRow {
    j: usize,
    k: usize,
    direct: f64,
    quadrature: f64,
    abs_dev: f64,
}

#[derive(Serialize)]
struct RegularizerRow {
    m: usize,
    sum: f64,
    comparison: f64,
    /// `|S(m) - S(m/2)|`; empty on the first row.
    cauchy_diff: Option<f64>,
}

pub fn lro(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<Outcome, CliError> {
    if args.check.is_none() && !args.regularizer && !args.threshold {
        return Err(CliError::Usage(
            "lro needs --check, --regularizer or --threshold".into(),
        ));
    }
    let mut pass = true;
    match args.check {
        Some(LroCheck::Ir) => pass &= lro_ir(cfg, args, out)?,
        Some(LroCheck::Gd) => pass &= lro_gd(cfg, args, out)?,
        Some(LroCheck::Intrep) => pass &= lro_intrep(cfg, args, out)?,
        None => {}
    }
    if args.regularizer {
        pass &= lro_regularizer(cfg, args, out)?;
    }
    if args.threshold {
        lro_threshold(cfg, args, out)?;
    }
    Ok(Outcome::from_pass(pass))
}

fn model(cfg: &RunConfig, m: usize) -> Result<TorusModel, CliError> {
    Ok(TorusModel::new(m, cfg.gamma, cfg.eps, cfg.alpha)?)
}

fn lro_ir(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<bool, CliError> {
    let model = model(cfg, args.m)?;
    let rows: Vec<IrRow> = infrared_check(&model)?
        .into_iter()
        .map(|r| IrRow {
            k: r.k,
            p: r.p,
            r: spectral_r(r.k, &model),
            e: dispersion_e(r.k, &model),
            inv_2e: r.bound,
            g: r.g,
            holds: r.holds,
        })
        .collect();
    out.write("ir.csv", &csv_table(&rows)?)?;
    let held = rows.iter().filter(|r| r.holds).count();
    eprintln!("infrared bound at m={}: {held}/{} momenta", args.m, rows.len());
    Ok(held == rows.len())
}

fn lro_gd(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<bool, CliError> {
    let model = model(cfg, args.m)?;
    let n = model.sites();
    let z0 = log_partition_shifted(&model, &vec![0.0; n])?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let fields: Vec<Vec<f64>> = (0..args.samples)
        .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let ratios = fields
        .par_iter()
        .map(|h| log_partition_shifted(&model, h).map(|z| z - z0))
        .collect::<Result<Vec<f64>, _>>()?;
    let slack = rgstep_core::lro::DOMINATION_SLACK.ln_1p();
    let rows: Vec<GdRow> = ratios
        .iter()
        .enumerate()
        .map(|(i, &r)| GdRow {
            sample: i,
            log_ratio: r,
            holds: r <= slack,
        })
        .collect();
    out.write("gd.csv", &csv_table(&rows)?)?;

    let mut second = Vec::new();
    for k in (1..n).filter(|k| k % args.m != 0) {
        let s = second_order_check(&model, k, 1e-2)?;
        second.push(SecondOrderRow {
            k,
            finite_difference: s.finite_difference,
            predicted: s.predicted,
            rel_gap: (s.finite_difference - s.predicted).abs() / s.predicted.abs().max(1.0),
        });
    }
    out.write("second_order.csv", &csv_table(&second)?)?;
    let held = rows.iter().filter(|r| r.holds).count();
    let gap = second.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    eprintln!(
        "Gaussian domination at m={}: {held}/{} fields; second-order gap {gap:.1e}",
        args.m,
        rows.len()
    );
    Ok(held == rows.len() && gap < SECOND_ORDER_TOL)
}

fn lro_intrep(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<bool, CliError> {
    let m = args.m;
    let pairs: Vec<(usize, usize)> = (1..=m).flat_map(|j| (1..=m).map(move |k| (j, k))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(j, k)| {
            integral_rep_check(j, k, m, cfg.alpha).map(|(direct, quadrature)| IntrepRow {
                j,
                k,
                direct,
                quadrature,
                abs_dev: (direct - quadrature).abs(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.write("intrep.csv", &csv_table(&rows)?)?;
    let dev = rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max);
    eprintln!("integral representation at m={m}: max deviation {dev:.1e}");
    Ok(dev < INTREP_TOL)
}

fn lro_regularizer(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<bool, CliError> {
    if args.m_max < 16 || !args.m_max.is_power_of_two() {
        return Err(CliError::Usage("--m-max must be a power of two >= 16".into()));
    }
    let ms: Vec<usize> = (4..=args.m_max.trailing_zeros()).map(|e| 1usize << e).collect();
    let sums = ms
        .par_iter()
        .map(|&m| TorusCouplings::new(m, cfg.alpha).map(|t| regularizer_sum_of(&t)))
        .collect::<Result<Vec<f64>, _>>()?;
    let rows: Vec<RegularizerRow> = ms
        .iter()
        .zip(&sums)
        .enumerate()
        .map(|(i, (&m, &s))| RegularizerRow {
            m,
            sum: s,
            comparison: regularizer_comparison(m, cfg.alpha),
            cauchy_diff: (i > 0).then(|| (s - sums[i - 1]).abs()),
        })
        .collect();
    out.write("regularizer.csv", &csv_table(&rows)?)?;
    let dominated = rows.iter().all(|r| r.sum <= r.comparison);
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.cauchy_diff).collect();
    let shrinking = diffs.windows(2).all(|w| w[1] < w[0]);
    eprintln!(
        "regularizer sums at alpha={}: {:.6} .. {:.6}, dominated={dominated}, differences shrink={shrinking}",
        cfg.alpha,
        sums[0],
        sums[sums.len() - 1]
    );
    Ok(dominated && shrinking)
}

fn lro_threshold(cfg: &RunConfig, args: &LroArgs, out: &Output) -> Result<(), CliError> {
    if cfg.eps <= 0.0 {
        return Err(CliError::Usage("--threshold needs eps > 0".into()));
    }
    let g = lro_gamma_threshold(cfg.eps, cfg.alpha, args.m)?;
    let at = TorusModel::new(args.m, g, cfg.eps, cfg.alpha)?;
    let report = LroThresholdReport {
        eps: cfg.eps,
        alpha: cfg.alpha,
        m: args.m,
        gamma_threshold: g,
        infrared_sum: infrared_sum(&at),
        kind: "sufficient bound",
    };
    out.json("lro_threshold.json", &report)?;
    eprintln!(
        "gamma above {g:.8} gives infrared sum < 1 at m={} (sufficient bound)",
        args.m
    );
    Ok(())
}
