use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rgstep::commands::{self, LroArgs, LroCheck};
use rgstep::config::{ConfigError, Overrides, RunConfig};
use rgstep::report::Output;
use rgstep::selfcheck::{self, Mutation};
use rgstep::CliError;

#[derive(Parser)]
#[command(name = "rgstep", version, about = "First block-spin RG step for long-range Ising chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// decimation or majority
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// float or interval
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    window_sigma: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    window_s: Option<i32>,
    /// Directory for artifacts; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the contraction certificate at the seed
    Certify {
        #[command(flatten)]
        common: Common,
        /// Also bisect for the largest certified eps
        #[arg(long)]
        threshold: bool,
    },
    /// Iterate to the fixed point and write the renormalized Hamiltonian
    Iterate {
        #[command(flatten)]
        common: Common,
    },
    /// Torus checks behind the long-range-order argument
    Lro {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        check: Option<LroCheck>,
        /// Half the number of torus sites
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Tabulate the regularizer sums for m = 16, 32, .., m-max
        #[arg(long)]
        regularizer: bool,
        #[arg(long, default_value_t = 4096)]
        m_max: usize,
        /// Smallest gamma with infrared sum < 1 (a sufficient bound)
        #[arg(long)]
        threshold: bool,
        /// Random fields for --check gd
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Regression suite over fixed reference values
    Selfcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mutate: Option<Mutation>,
    },
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            kernel: self.kernel.clone(),
            gamma: self.gamma,
            eps: self.eps,
            alpha: self.alpha,
            mu: self.mu,
            nu: self.nu,
            mode: self.mode.clone(),
            tol: self.tol,
            max_iter: self.max_iter,
            window_sigma: self.window_sigma,
            window_s: self.window_s,
            out: self.out.clone(),
        }
    }

    /// Defaults, then the config file, then flags.
    fn resolve(&self, defaults: Overrides) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(p) => Overrides::from_file(p)?,
            None => Overrides::default(),
        };
        RunConfig::resolve(defaults.layered(file).layered(self.overrides()))
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("RG_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("RG_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Usage("RG_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<rgstep::Outcome, CliError> {
    init_threads()?;
    match cli.command {
        Command::Certify { common, threshold } => {
            let cfg = common.resolve(Overrides::default())?;
            commands::certify(&cfg, threshold, &Output::new(cfg.out.clone()))
        }
        Command::Iterate { common } => {
            let cfg = common.resolve(Overrides::default())?;
            commands::iterate_cmd(&cfg, &Output::new(cfg.out.clone()))
        }
        Command::Lro {
            common,
            check,
            m,
            regularizer,
            m_max,
            threshold,
            samples,
            seed,
        } => {
            // torus defaults: moderate couplings the enumeration handles
            let defaults = Overrides {
                gamma: Some(0.7),
                eps: Some(0.3),
                alpha: Some(1.5),
                ..Overrides::default()
            };
            let cfg = common.resolve(defaults)?;
            let args = LroArgs {
                check,
                m,
                regularizer,
                m_max,
                threshold,
                samples,
                seed,
            };
            commands::lro(&cfg, &args, &Output::new(cfg.out.clone()))
        }
        Command::Selfcheck { common, mutate } => {
            let cfg = common.resolve(Overrides::default())?;
            selfcheck::run(cfg.mode, mutate)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
