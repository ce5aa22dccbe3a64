//! JSON reports and CSV tables.

use std::path::PathBuf;

use serde::Serialize;

use rgstep_core::certify::{Certificate, EpsilonThreshold, SeedPoint};
use rgstep_core::fixed_point::FixedPointResult;
use rgstep_core::{Mode, Scalar};

/// A number, or an enclosure in interval mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Float(f64),
    Enclosure { lo: f64, hi: f64 },
}

impl Quantity {
    pub fn of<S: Scalar>(x: S) -> Self {
        match S::MODE {
            Mode::Float => Quantity::Float(x.mid()),
            Mode::Interval => Quantity::Enclosure {
                lo: x.lower(),
                hi: x.upper(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    pub kernel: String,
    pub mode: String,
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedReport {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    /// Largest tested `ε` whose certificate passes.
    pub eps: f64,
    pub eps_fail: f64,
    pub bisection_steps: usize,
    pub objective: Quantity,
    pub note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub parameters: Parameters,
    pub seed: SeedReport,
    pub d0: Quantity,
    pub d0_components: [Quantity; 3],
    pub residual: Quantity,
    /// `‖Ĥ - Ĥ₀‖` with pair terms weighted by `e^{2μ}`; the value the
    /// verdict uses.
    pub h: Quantity,
    /// The same tail without the pair weight.
    pub h_unweighted: Quantity,
    pub r_max: Quantity,
    pub r_star: f64,
    pub objective: Quantity,
    pub verdict: &'static str,
    pub note: Option<&'static str>,
    pub threshold: Option<ThresholdReport>,
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

impl CertificateReport {
    pub fn new<S: Scalar>(
        seed: &SeedPoint,
        c: &Certificate<S>,
        threshold: Option<&EpsilonThreshold<S>>,
    ) -> Self {
        CertificateReport {
            parameters: Parameters {
                kernel: c.kernel.to_string(),
                mode: c.mode.to_string(),
                gamma: c.gamma,
                eps: c.eps,
                alpha: c.alpha,
                mu: c.weights.mu,
                nu: c.weights.nu,
            },
            seed: SeedReport { a: seed.a, b: seed.b },
            d0: Quantity::of(c.d0),
            d0_components: c.d0_components.map(Quantity::of),
            residual: Quantity::of(c.residual),
            h: Quantity::of(c.h),
            h_unweighted: Quantity::of(c.h_unweighted),
            r_max: Quantity::of(c.r_max),
            r_star: c.r_star,
            objective: Quantity::of(c.objective),
            verdict: verdict(c.pass),
            note: c.note.map(|n| n.as_str()),
            threshold: threshold.map(|t| ThresholdReport {
                eps: t.eps,
                eps_fail: t.eps_fail,
                bisection_steps: t.bisection_steps,
                objective: Quantity::of(t.certificate.objective),
                note: "depends on the chosen kernel, mu, nu, gamma and alpha",
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterateReport {
    pub parameters: Parameters,
    pub tol: f64,
    pub max_iter: usize,
    pub window_sigma: i32,
    pub window_s: i32,
    pub converged: bool,
    pub iterations: usize,
    pub residual: Quantity,
    pub free_energy: Quantity,
    pub single_flip_norm: Quantity,
    pub hprime_classes: usize,
    pub truncation_loss: f64,
    pub empty_y_mass: f64,
    pub hamiltonian_range: usize,
    pub hamiltonian_tail: Quantity,
    pub certificate: &'static str,
    pub certificate_objective: Quantity,
    /// `𝒟₀ + ρ(r* + h)` when the certificate passes.
    pub rate_bound: Option<f64>,
    pub worst_rate_after_burn_in: Option<f64>,
}

impl IterateReport {
    pub fn new<S: Scalar>(
        parameters: Parameters,
        policy: (f64, usize, i32, i32),
        r: &FixedPointResult<S>,
        cert: &Certificate<S>,
        rate_bound: Option<f64>,
    ) -> Self {
        let worst = r.rates_after(2).iter().copied().fold(None, |m: Option<f64>, x| {
            Some(m.map_or(x, |m| m.max(x)))
        });
        IterateReport {
            parameters,
            tol: policy.0,
            max_iter: policy.1,
            window_sigma: policy.2,
            window_s: policy.3,
            converged: r.converged,
            iterations: r.iterations,
            residual: Quantity::of(r.residual),
            free_energy: Quantity::of(r.hamiltonian.free_energy),
            single_flip_norm: Quantity::of(r.single_flip_norm),
            hprime_classes: r.hamiltonian.classes.len(),
            // + 0.0 turns a -0.0 norm into 0.0
            truncation_loss: r.truncation_loss + 0.0,
            empty_y_mass: r.empty_y_mass + 0.0,
            hamiltonian_range: r.hamiltonian_range,
            hamiltonian_tail: Quantity::of(r.hamiltonian_tail),
            certificate: verdict(cert.pass),
            certificate_objective: Quantity::of(cert.objective),
            rate_bound,
            worst_rate_after_burn_in: worst,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LroThresholdReport {
    pub eps: f64,
    pub alpha: f64,
    pub m: usize,
    pub gamma_threshold: f64,
    pub infrared_sum: f64,
    pub kind: &'static str,
}

/// CSV text with a header row.
pub fn csv_table<R: Serialize>(rows: &[R]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Where artifacts go: files in a directory, or stdout.
#[derive(Debug, Clone)]
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Output { dir }
    }

    pub fn write(&self, name: &str, contents: &str) -> std::io::Result<()> {
        match &self.dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                std::fs::write(d.join(name), contents)
            }
            None => {
                println!("# {name}");
                print!("{contents}");
                Ok(())
            }
        }
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        s.push('\n');
        self.write(name, &s)
    }
}
