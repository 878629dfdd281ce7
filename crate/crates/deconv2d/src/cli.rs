//! Command-line front end.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use deconv2d_core::certify::{delta_grid, CertifyConfig};
use deconv2d_core::envelope::EnvelopeGridSpec;
use deconv2d_core::kernels::KernelKind;
use deconv2d_core::solver::{Pattern, SolverOptions};

use crate::cache;
use crate::config;
use crate::csvout::{emit, num};
use crate::error::{AppError, AppResult};
use crate::experiments::{self, PhaseConfig};

#[derive(Debug, Parser)]
#[command(name = "deconv2d", version, about = "Certified 2-D Gaussian deconvolution: envelopes, certification and recovery experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    /// `key = value` file whose pairs act as default flags for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build envelope sets and write one cache file per kind.
    Envelopes(EnvelopesArgs),
    /// Certify exact recovery over a grid of separations.
    Certify(CertifyArgs),
    /// Run seeded basis-pursuit recovery trials at one parameter point.
    Recover(RecoverArgs),
    /// Singular values of the sampling matrix of an 8x8 lattice.
    Svd(SvdArgs),
    /// Recovery rates over a grid of separations and spacings.
    PhaseDiagram(PhaseArgs),
    /// Solve the interpolation system for a random support and dump Q on a grid.
    CertificateDemo(DemoArgs),
}

/// `desk`, `fine`, or a single resolution used for both `t` and `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution(pub u32);

impl std::str::FromStr for Resolution {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "desk" => Ok(Resolution(10)),
            "fine" => Ok(Resolution(40)),
            _ => match s.parse::<u32>() {
                Ok(n) if n > 0 => Ok(Resolution(n)),
                _ => Err(format!("expected desk, fine or a positive integer, got {s:?}")),
            },
        }
    }
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    KernelKind::parse(s).ok_or_else(|| format!("unknown kernel {s:?}"))
}

fn parse_pattern(s: &str) -> Result<Pattern, String> {
    Pattern::parse(s).ok_or_else(|| format!("unknown pattern {s:?}"))
}

#[derive(Debug, Args)]
pub struct EnvelopesArgs {
    /// Band indices, 1 to 16.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', required = true)]
    pub k1: Vec<u32>,
    #[arg(long, default_value = "desk")]
    pub resolution: Resolution,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 4.0)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 6.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta_step: f64,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "5")]
    pub zeta_bands: Vec<u32>,
    #[arg(long, default_value = "desk")]
    pub resolution: Resolution,
    /// Directory for cached envelopes; built and filled when incomplete.
    #[arg(long)]
    pub envelope_cache: Option<PathBuf>,
    #[arg(long, default_value_t = deconv2d_core::certify::SEGMENTS)]
    pub segments: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iters: self.max_iters, ..SolverOptions::default() }
    }
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    #[arg(long, default_value_t = 25)]
    pub n_spikes: usize,
    #[arg(long, default_value = "full_grid", value_parser = parse_pattern)]
    pub pattern: Pattern,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: KernelKind,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SvdArgs {
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.5,0.75,1,1.25,1.5,1.75,2")]
    pub deltas: Vec<f64>,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.5")]
    pub zetas: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: KernelKind,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.75,1,1.5,2")]
    pub deltas: Vec<f64>,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.5")]
    pub zetas: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "full_grid", value_parser = parse_pattern)]
    pub pattern: Pattern,
    #[arg(long, default_value_t = 25)]
    pub n_spikes: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 3)]
    pub n_spikes: usize,
    #[arg(long, default_value_t = 4.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Spacing of the evaluation grid.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn check_range(lo: f64, hi: f64, step: f64) -> AppResult<()> {
    if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
        return Err(AppError::Usage("need delta-min <= delta-max and delta-step > 0".into()));
    }
    Ok(())
}

pub fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Envelopes(a) => {
            for &k1 in &a.k1 {
                let spec = EnvelopeGridSpec::new(k1, a.resolution.0, a.resolution.0);
                spec.validate()?;
                let set = deconv2d_core::envelope::build_envelopes(&spec)?;
                for p in cache::save_set(&a.out, &set)? {
                    println!("{}", p.display());
                }
            }
            Ok(())
        }
        Command::Certify(a) => {
            check_range(a.delta_min, a.delta_max, a.delta_step)?;
            let deltas = delta_grid(a.delta_min, a.delta_max, a.delta_step);
            let sets = a
                .zeta_bands
                .iter()
                .map(|&k1| {
                    let spec = EnvelopeGridSpec::new(k1, a.resolution.0, a.resolution.0);
                    spec.validate()?;
                    cache::load_or_build(a.envelope_cache.as_deref(), spec)
                })
                .collect::<AppResult<Vec<_>>>()?;
            let rows = experiments::certify_sweep(&deltas, &sets, &CertifyConfig { segments: a.segments })?;
            emit(a.out.as_deref(), &experiments::CERTIFY_HEADER, &experiments::certify_rows(&rows))
        }
        Command::Recover(a) => {
            let cfg = PhaseConfig {
                kernel: a.kernel,
                pattern: a.pattern,
                n_spikes: a.n_spikes,
                trials: a.trials,
                seed: a.seed,
                solver: a.solver.options(),
            };
            let rows = experiments::phase_diagram(&[a.delta], &[a.zeta], &cfg)?;
            emit(a.out.as_deref(), &experiments::PHASE_HEADER, &experiments::phase_rows(&rows))
        }
        Command::Svd(a) => {
            let rows = experiments::svd_conditioning(&a.deltas, &a.zetas)?;
            emit(a.out.as_deref(), &experiments::SVD_HEADER, &experiments::svd_rows(&rows))
        }
        Command::PhaseDiagram(a) => {
            let cfg = PhaseConfig {
                kernel: a.kernel,
                pattern: a.pattern,
                n_spikes: a.n_spikes,
                trials: a.trials,
                seed: a.seed,
                solver: a.solver.options(),
            };
            let rows = experiments::phase_diagram(&a.deltas, &a.zetas, &cfg)?;
            emit(a.out.as_deref(), &experiments::PHASE_HEADER, &experiments::phase_rows(&rows))
        }
        Command::CertificateDemo(a) => {
            if !(a.step > 0.0) {
                return Err(AppError::Usage("step must be positive".into()));
            }
            let demo = experiments::certificate_demo(a.n_spikes, a.delta, a.zeta, a.step, a.seed)?;
            let rows: Vec<Vec<String>> = demo.grid.iter().map(|p| p.iter().map(|&v| num(v)).collect()).collect();
            emit(a.out.as_deref(), &["x", "y", "q"], &rows)
        }
    }
}

/// Parses `argv` (including the program name), applying `--config`, and
/// runs the command. Returns the process exit code.
pub fn main_with_args(argv: Vec<String>) -> i32 {
    let argv = match config_path(&argv) {
        Some(path) => match config::load(&path) {
            Ok(pairs) => config::splice(&argv, &pairs),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        None => argv,
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).map(PathBuf::from)
        } else {
            a.strip_prefix("--config=").map(PathBuf::from)
        }
    })
}
