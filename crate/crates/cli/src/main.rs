//! `hyperboloid`: derive, simulate, spectrum, verify.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 numerical or symbolic
//! tolerance failure, 64 usage error.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_TOLERANCE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hyperboloid", version, about = "Free particle on the Poincaré hyperboloid")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constraint chain, bracket matrix, Dirac brackets and ISO(1,2) checks.
    Derive,
    /// Geodesic trajectory as CSV, with a drift summary.
    Simulate(SimulateArgs),
    /// Conical-function eigenfunctions and their eigen-residuals.
    Spectrum(SpectrumArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Initial position `x,y,z`; projected onto the hyperboloid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Initial canonical momentum `p_x,p_y,p_z`; projected onto the tangent plane.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p0: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub no_projection: bool,
    #[arg(long)]
    pub sample_every: Option<usize>,
    #[arg(long)]
    pub tol_c: Option<f64>,
    #[arg(long)]
    pub tol_drift: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long = "lambda", value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long = "n", value_delimiter = ',', allow_hyphen_values = true)]
    pub orders: Option<Vec<i32>>,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Azimuth at which samples are reported.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Report every `stride`-th θ row.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Leave out the normalization factor.
    #[arg(long)]
    pub unnormalized: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only one module's checks.
    #[arg(long)]
    pub only: Option<String>,
    /// Inject a fault to exercise a negative control.
    #[arg(long, value_enum, hide = true)]
    pub inject: Vec<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    EpsilonSign,
    DropOrderingTerm,
    FlipRecurrence,
    GeneratorPhase,
}

/// Everything a subcommand needs besides its own arguments.
pub struct Context {
    pub config: RunConfig,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Context {
    /// Writes to `--out` if given, else to standard output.
    pub fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
            None => {
                let mut o = std::io::stdout().lock();
                o.write_all(text.as_bytes()).map_err(|e| Failure::usage(e.to_string()))
            }
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::usage)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.seed {
        config.seed = v;
    }
    if let Some(v) = cli.a {
        config.a = v;
    }
    if let Some(v) = cli.m {
        config.m = v;
    }
    if let Some(v) = cli.hbar {
        config.hbar = v;
    }
    let mut ctx = Context {
        config,
        format: cli.format,
        out: cli.out,
    };
    match cli.command {
        Command::Derive => {
            ctx.config.validate().map_err(Failure::usage)?;
            commands::derive(&ctx)
        }
        Command::Simulate(args) => {
            let c = &mut ctx.config;
            if let Some(v) = args.dt {
                c.dt = v;
            }
            if let Some(v) = args.t_end {
                c.t_end = v;
            }
            if args.no_projection {
                c.projection = false;
            }
            if let Some(v) = args.sample_every {
                c.sample_every = v;
            }
            if let Some(v) = args.tol_c {
                c.tol_c = v;
            }
            if let Some(v) = args.tol_drift {
                c.tol_drift = v;
            }
            ctx.config.validate().map_err(Failure::usage)?;
            commands::simulate(&ctx, &args)
        }
        Command::Spectrum(args) => {
            let c = &mut ctx.config;
            if let Some(v) = &args.lambdas {
                c.lambdas = v.clone();
            }
            if let Some(v) = &args.orders {
                c.orders = v.clone();
            }
            if let Some(v) = args.theta_min {
                c.theta_min = v;
            }
            if let Some(v) = args.theta_max {
                c.theta_max = v;
            }
            if let Some(v) = args.h {
                c.h = v;
            }
            if let Some(v) = args.n_phi {
                c.n_phi = v;
            }
            if args.stride == 0 {
                return Err(Failure::usage("stride must be at least 1"));
            }
            ctx.config.validate().map_err(Failure::usage)?;
            commands::spectrum(&ctx, &args)
        }
        Command::Verify(args) => {
            ctx.config.validate().map_err(Failure::usage)?;
            commands::verify(&ctx, &args)
        }
    }
}
