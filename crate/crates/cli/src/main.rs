//! Command-line front end: code construction, error-rate sweeps and
//! capacity tables. All randomness flows from `--seed`; identical
//! invocations produce identical outputs (wall-time column aside).

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use polarwin_core::channel::{self, ChannelParams};
use polarwin_core::polar;
use polarwin_core::sim::{self, DecoderKind, DecoderSetup, SimConfig};

#[derive(Parser)]
#[command(
    name = "polarwin",
    about = "Polar codes with joint SCAN decoding and channel-state estimation \
             on piecewise-stationary AWGN channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a polar code by Monte Carlo simulation and write the
    /// code-spec file.
    Construct(ConstructArgs),
    /// Run a BER/FER/FPR sweep and emit a CSV report.
    Simulate(SimulateArgs),
    /// Print the genie and equivalent-stationary capacity bounds.
    Capacity(CapacityArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Number of polarization levels; code length is N = 2^n.
    #[arg(long)]
    n: usize,
    /// Code rate K/N.
    #[arg(long)]
    rate: f64,
    /// Design noise variance of the stationary construction channel.
    #[arg(long = "sigma-bar2")]
    sigma_bar2: f64,
    /// Monte Carlo construction trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Master seed for construction and the transmission permutation.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output code-spec file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Code-spec file written by `construct`.
    #[arg(long)]
    spec: PathBuf,
    /// Poisson mean piece length of the channel.
    #[arg(long, default_value_t = 64.0)]
    lambda: f64,
    /// Sweep points: mean noise variances, comma separated.
    #[arg(long = "sigma-bar2", value_delimiter = ',', required = true)]
    sigma_bar2: Vec<f64>,
    /// Noise-variance multipliers of the channel state space.
    #[arg(long = "state-multipliers", value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    state_multipliers: Vec<f64>,
    /// Decoders to run (sc, scan, swscan, w2scan).
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = ["sc".to_string(), "scan".to_string(), "swscan".to_string(), "w2scan".to_string()]
    )]
    decoders: Vec<String>,
    /// Window multiplier for the weighted-window decoder.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Trials per sweep point.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Iteration budget for the iterative decoders; defaults to n+1.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Master seed; per-trial streams derive from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output path (the table is always printed to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    /// Poisson mean piece length (part of the channel description; the
    /// capacity bounds do not depend on it).
    #[arg(long, default_value_t = 64.0)]
    lambda: f64,
    /// Mean noise variances, comma separated.
    #[arg(long = "sigma-bar2", value_delimiter = ',', required = true)]
    sigma_bar2: Vec<f64>,
    /// Noise-variance multipliers of the channel state space.
    #[arg(long = "state-multipliers", value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    state_multipliers: Vec<f64>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Construct(args) => construct(args),
        Command::Simulate(args) => simulate(args),
        Command::Capacity(args) => capacity(args),
    }
}

fn construct(args: ConstructArgs) -> Result<()> {
    if !(args.rate > 0.0 && args.rate <= 1.0) {
        bail!("rate must be in (0, 1]");
    }
    if args.sigma_bar2 <= 0.0 {
        bail!("sigma-bar2 must be positive");
    }
    let len = 1usize
        .checked_shl(args.n as u32)
        .context("code length overflow")?;
    let k = ((len as f64 * args.rate).round() as usize).clamp(1, len);
    let (spec, _) =
        polar::construct_code_monte_carlo(args.n, k, args.sigma_bar2, args.trials, args.seed)?;
    polar::write_spec_file(&spec, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "constructed N={} K={} (rate {}) over {} trials at sigma2={}; wrote {}",
        spec.len(),
        spec.k(),
        sim::fmt_sig6(spec.rate()),
        args.trials,
        sim::fmt_sig6(args.sigma_bar2),
        args.out.display()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let spec = polar::read_spec_file(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let decoders: Vec<DecoderSetup> = args
        .decoders
        .iter()
        .map(|name| {
            name.parse::<DecoderKind>()
                .map(|kind| DecoderSetup::new(kind, args.alpha))
                .map_err(anyhow::Error::msg)
        })
        .collect::<Result<_>>()?;
    let config = SimConfig {
        lambda: args.lambda,
        state_multipliers: args.state_multipliers,
        sigma_bar2_list: args.sigma_bar2,
        decoders,
        trials: args.trials,
        max_iters: args.max_iters.unwrap_or(spec.levels() + 1),
        seed: args.seed,
    };
    let cells = sim::run_sweep(&config, &spec)?;
    let report = match &args.out {
        Some(path) => sim::emit_report(&cells, path)?,
        None => sim::render_report(&cells),
    };
    print!("{report}");
    Ok(())
}

fn capacity(args: CapacityArgs) -> Result<()> {
    if args.lambda <= 0.0 {
        bail!("lambda must be positive");
    }
    println!("sigma_bar2,eb_n0_db,c_hat,c_bar");
    for &s2 in &args.sigma_bar2 {
        if s2 <= 0.0 {
            bail!("sigma-bar2 must be positive");
        }
        let states: Vec<f64> = args.state_multipliers.iter().map(|&m| m * s2).collect();
        let params = ChannelParams::uniform(args.lambda, &states);
        let (c_hat, c_bar) = channel::capacities(&params)?;
        println!(
            "{},{},{},{}",
            sim::fmt_sig6(s2),
            sim::fmt_sig6(channel::eb_n0_db(s2, 0.0)),
            sim::fmt_sig6(c_hat),
            sim::fmt_sig6(c_bar)
        );
    }
    Ok(())
}
