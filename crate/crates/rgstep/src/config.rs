//! Run configuration: a flat `key=value` file overridden by flags.

use std::path::{Path, PathBuf};

use rgstep_core::fixed_point::{IterationControl, TruncationPolicy};
use rgstep_core::rg_map::KernelId;
use rgstep_core::spin_algebra::NormWeights;
use rgstep_core::Mode;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

/// Settings that may come from the config file or from flags; `None`
/// means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kernel: Option<String>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub mode: Option<String>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub window_sigma: Option<i32>,
    pub window_s: Option<i32>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Parses a config file body. Keys match the long flag names; `_` and
    /// `-` are interchangeable.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim().replace('_', "-"), v.trim());
            let bad = || ConfigError::BadValue {
                key: k.clone(),
                value: v.to_string(),
            };
            let num = || v.parse::<f64>().map_err(|_| bad());
            match k.as_str() {
                "kernel" => o.kernel = Some(v.to_string()),
                "gamma" => o.gamma = Some(num()?),
                "eps" => o.eps = Some(num()?),
                "alpha" => o.alpha = Some(num()?),
                "mu" => o.mu = Some(num()?),
                "nu" => o.nu = Some(num()?),
                "mode" => o.mode = Some(v.to_string()),
                "tol" => o.tol = Some(num()?),
                "max-iter" => o.max_iter = Some(v.parse().map_err(|_| bad())?),
                "window-sigma" => o.window_sigma = Some(v.parse().map_err(|_| bad())?),
                "window-s" => o.window_s = Some(v.parse().map_err(|_| bad())?),
                "out" => o.out = Some(PathBuf::from(v)),
                _ => return Err(ConfigError::UnknownKey(k)),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// `self` with every field set in `top` replaced.
    pub fn layered(self, top: Overrides) -> Overrides {
        Overrides {
            kernel: top.kernel.or(self.kernel),
            gamma: top.gamma.or(self.gamma),
            eps: top.eps.or(self.eps),
            alpha: top.alpha.or(self.alpha),
            mu: top.mu.or(self.mu),
            nu: top.nu.or(self.nu),
            mode: top.mode.or(self.mode),
            tol: top.tol.or(self.tol),
            max_iter: top.max_iter.or(self.max_iter),
            window_sigma: top.window_sigma.or(self.window_sigma),
            window_s: top.window_s.or(self.window_s),
            out: top.out.or(self.out),
        }
    }
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kernel: KernelId,
    pub gamma: f64,
    pub eps: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
    pub mode: Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub window_sigma: i32,
    pub window_s: i32,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<Self, ConfigError> {
        let policy = TruncationPolicy::default();
        let control = IterationControl::default();
        let kernel = match o.kernel.as_deref() {
            None => KernelId::Majority,
            Some(s) => s.parse().map_err(|_| ConfigError::BadValue {
                key: "kernel".into(),
                value: s.into(),
            })?,
        };
        let mode = match o.mode.as_deref() {
            None | Some("float") => Mode::Float,
            Some("interval") => Mode::Interval,
            Some(s) => {
                return Err(ConfigError::BadValue {
                    key: "mode".into(),
                    value: s.into(),
                })
            }
        };
        let c = RunConfig {
            kernel,
            gamma: o.gamma.unwrap_or(40.0),
            eps: o.eps.unwrap_or(0.0),
            alpha: o.alpha.unwrap_or(2.0),
            mu: o.mu.unwrap_or(1.0),
            nu: o.nu.unwrap_or(0.0),
            mode,
            tol: o.tol.unwrap_or(control.tol),
            max_iter: o.max_iter.unwrap_or(control.max_iter),
            window_sigma: o.window_sigma.unwrap_or(policy.window_sigma),
            window_s: o.window_s.unwrap_or(policy.window_s),
            out: o.out,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        let all_finite = [self.gamma, self.eps, self.alpha, self.mu, self.nu, self.tol]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return fail("parameters must be finite");
        }
        if self.gamma <= 0.0 {
            return fail("gamma must be > 0");
        }
        if self.eps < 0.0 {
            return fail("eps must be >= 0");
        }
        if self.alpha <= 1.0 {
            return fail("alpha must be > 1");
        }
        if self.mu < 0.0 || self.nu < 0.0 {
            return fail("mu and nu must be >= 0");
        }
        if self.tol <= 0.0 {
            return fail("tol must be > 0");
        }
        if self.max_iter == 0 {
            return fail("max-iter must be >= 1");
        }
        if self.window_sigma < 2 || self.window_s > -1 {
            return fail("window-sigma must be >= 2 and window-s <= -1");
        }
        Ok(())
    }

    pub fn weights(&self) -> NormWeights {
        NormWeights::new(self.mu, self.nu).expect("validated weights")
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy {
            window_sigma: self.window_sigma,
            window_s: self.window_s,
            ..TruncationPolicy::default()
        }
    }

    pub fn control(&self) -> IterationControl {
        IterationControl {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}
