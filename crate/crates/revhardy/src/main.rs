//! Batch front-end: parse flags and/or a configuration file, dispatch the
//! verification, emit the report, exit with the verdict code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use revhardy::config::{run, render, CommandKind, GridSpec, OutputFormat, RunConfig};
use revhardy::error::Error;

#[derive(Parser)]
#[command(
    name = "revhardy",
    version,
    about = "Numerical verification of reverse Hardy-type inequalities with negative exponents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the reverse Hardy inequality for power weights on a space.
    CheckHardy(CommonArgs),
    /// Verify the conjugate inequality (inner integral over the complement).
    CheckConjugateHardy(CommonArgs),
    /// Closed-form constant and two-sided bracket for power weights.
    ComputeConstant(CommonArgs),
    /// Reverse Hardy-Littlewood-Sobolev check (strict q < p).
    CheckHls(CommonArgs),
    /// Reverse Stein-Weiss check with radial power weights.
    CheckSteinWeiss(CommonArgs),
    /// Tabulate constants over (p, q, alpha) grids with beta solved from
    /// the balance condition.
    Scan(ScanArgs),
    /// Quasi-sphere measure by quadrature and Monte Carlo, with the
    /// dilation-volume diagnostics.
    SphereArea(CommonArgs),
    /// Check the cumulative identity used inside the lower-bound proof.
    ProofIdentities(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Space selection: euclidean:<n>, heisenberg:1, hyperbolic:<n>.
    #[arg(long)]
    space: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Weight exponent beta; solved from the balance condition if omitted.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Number of admissible test functions (or Stein-Weiss pairs).
    #[arg(long)]
    family_count: Option<usize>,
    /// Seed for family generation and Monte Carlo streams.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    mc_samples: Option<u64>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// p grid as lo:hi:count.
    #[arg(long, allow_negative_numbers = true)]
    p_grid: Option<String>,
    /// q grid as lo:hi:count.
    #[arg(long, allow_negative_numbers = true)]
    q_grid: Option<String>,
    /// alpha grid as lo:hi:count.
    #[arg(long, allow_negative_numbers = true)]
    alpha_grid: Option<String>,
}

fn resolve(kind: CommandKind, args: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mut from_file = RunConfig::from_file_text(&text)?;
            from_file.command = kind;
            from_file
        }
        None => RunConfig::new(kind),
    };
    if let Some(space) = &args.space {
        cfg.space = space.clone();
    }
    if args.p.is_some() {
        cfg.p = args.p;
    }
    if args.q.is_some() {
        cfg.q = args.q;
    }
    if args.alpha.is_some() {
        cfg.alpha = args.alpha;
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if let Some(c) = args.family_count {
        cfg.family_count = c;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(t) = args.abs_tol {
        cfg.abs_tol = t;
    }
    if let Some(n) = args.mc_samples {
        cfg.mc_samples = n;
    }
    if let Some(f) = &args.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if let Some(path) = &args.output {
        cfg.output = Some(path.display().to_string());
    }
    Ok(cfg)
}

fn execute() -> Result<i32, Error> {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Command::CheckHardy(a) => resolve(CommandKind::CheckHardy, a)?,
        Command::CheckConjugateHardy(a) => resolve(CommandKind::CheckConjugateHardy, a)?,
        Command::ComputeConstant(a) => resolve(CommandKind::ComputeConstant, a)?,
        Command::CheckHls(a) => resolve(CommandKind::CheckHls, a)?,
        Command::CheckSteinWeiss(a) => resolve(CommandKind::CheckSteinWeiss, a)?,
        Command::Scan(a) => {
            let mut cfg = resolve(CommandKind::Scan, &a.common)?;
            if let Some(g) = &a.p_grid {
                cfg.p_grid = Some(GridSpec::parse(g)?);
            }
            if let Some(g) = &a.q_grid {
                cfg.q_grid = Some(GridSpec::parse(g)?);
            }
            if let Some(g) = &a.alpha_grid {
                cfg.alpha_grid = Some(GridSpec::parse(g)?);
            }
            cfg
        }
        Command::SphereArea(a) => resolve(CommandKind::SphereArea, a)?,
        Command::ProofIdentities(a) => resolve(CommandKind::ProofIdentities, a)?,
    };

    let envelope = run(&cfg)?;
    let rendered = render(&envelope, cfg.format)?;
    println!("{rendered}");
    if let Some(path) = &cfg.output {
        std::fs::write(path, &rendered)?;
    }
    Ok(envelope.verdict.exit_code())
}

fn main() -> ExitCode {
    match execute() {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::ConfigError(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Error::InvalidParams(msg)) | Err(Error::InvalidExponents(msg)) => {
            eprintln!("invalid parameters: {msg}");
            ExitCode::from(2)
        }
        Err(other) => {
            eprintln!("numerical failure: {other}");
            ExitCode::from(3)
        }
    }
}
