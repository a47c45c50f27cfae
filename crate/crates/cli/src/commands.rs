use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use cde_core::distributions::{DistributionSource, NamedDistribution, RngSeed};
use cde_core::oracle::exact_expected_kl;
use cde_core::report::{format_significant, write_csv, write_json, JsonReport, CSV_DIGITS};
use cde_core::simulation::{run_experiment, ExperimentConfig};
use cde_core::{Distribution, Error, Estimator, EstimatorSpec, SampleProfile};

use crate::input::{parse_n_grid, NGrid, read_distribution, read_sample, split_names};

#[derive(Debug, Parser)]
#[command(name = "cde", version, about = "Competitive distribution estimation under KL loss")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo expected KL over a (distribution x estimator x n) grid.
    Simulate(SimulateArgs),
    /// Print one estimate for a sample file.
    Estimate(EstimateArgs),
    /// Exact expected KL by enumeration (small k and n only).
    Exact(ExactArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    k: usize,
    /// Comma list (`1000,2000`) or `start:stop:count`.
    #[arg(long, value_parser = parse_n_grid)]
    n_grid: NGrid,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "laplace,kt,braess-sauer,competitive,best-natural")]
    estimators: String,
    #[arg(long, default_value = "uniform,step,zipf1,zipf1.5,dir1,dir0.5")]
    distributions: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Draw Dirichlet-prior distributions once instead of per trial.
    #[arg(long)]
    fixed_prior: bool,
}

#[derive(Debug, clap::Args)]
struct TruthArgs {
    /// Named true distribution.
    #[arg(long, conflicts_with = "p")]
    dist: Option<String>,
    /// File with one probability per line.
    #[arg(long)]
    p: Option<PathBuf>,
    /// Seed for Dirichlet-prior draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, clap::Args)]
struct EstimateArgs {
    #[arg(long)]
    estimator: String,
    #[arg(long)]
    k: usize,
    /// File with one symbol index in [1..k] per line.
    #[arg(long)]
    sample: PathBuf,
    #[command(flatten)]
    truth: TruthArgs,
}

#[derive(Debug, clap::Args)]
struct ExactArgs {
    #[arg(long)]
    estimator: String,
    /// Alphabet size; required with --dist, checked against --p.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    truth: TruthArgs,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => 2,
            Error::UnknownName { .. } | Error::InvalidParameter(_) | Error::UndefinedEstimate(_) => 3,
            Error::Capacity(_) => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Estimate(args) => estimate(args),
        Command::Exact(args) => exact(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let config = ExperimentConfig {
        k: args.k,
        n_grid: args.n_grid.0,
        trials: args.trials,
        master_seed: args.seed,
        distributions: split_names(&args.distributions),
        estimators: split_names(&args.estimators),
        redraw_prior_per_trial: !args.fixed_prior,
    };
    // Resolve every name before any work so typos fail fast.
    for name in &config.distributions {
        name.parse::<NamedDistribution>()?.source(config.k)?;
    }
    for name in &config.estimators {
        EstimatorSpec::parse(name)?;
    }
    let records = run_experiment(&config)?;

    let mut buf = Vec::new();
    match args.format {
        Format::Csv => write_csv(&records, &mut buf)?,
        Format::Json => {
            write_json(&JsonReport::new(&config, records), &mut buf)?;
            buf.push(b'\n');
        }
    }
    match args.out {
        Some(path) => write_atomically(&path, &buf),
        None => io::stdout().write_all(&buf).map_err(|e| Failure::io(e.to_string())),
    }
}

/// Writes through a temporary file in the destination directory so a
/// failed run never leaves a partial file behind.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let err = |e: io::Error| Failure::io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn resolve_truth(truth: &TruthArgs, k: Option<usize>) -> Result<Option<Distribution>, Failure> {
    let p = match (&truth.dist, &truth.p) {
        (Some(name), _) => {
            let k = k.ok_or_else(|| Failure::usage("--dist needs --k"))?;
            let source = name.parse::<NamedDistribution>()?.source(k)?;
            Some(match source {
                DistributionSource::Fixed(p) => p,
                prior => prior.realize(&mut RngSeed::new(truth.seed, 0).rng())?,
            })
        }
        (None, Some(path)) => Some(read_distribution(path)?),
        (None, None) => None,
    };
    if let (Some(p), Some(k)) = (&p, k) {
        if p.k() != k {
            return Err(Failure::invalid(format!("distribution has {} entries but --k is {k}", p.k())));
        }
    }
    Ok(p)
}

fn estimate(args: EstimateArgs) -> Result<(), Failure> {
    let estimator = EstimatorSpec::parse(&args.estimator)?;
    let truth = resolve_truth(&args.truth, Some(args.k))?;
    if estimator.requires_true_p() && truth.is_none() {
        return Err(Failure::usage(format!("{estimator} needs the true distribution: pass --dist or --p")));
    }
    let sample = read_sample(&args.sample, args.k)?;
    let q = estimator.estimate(&SampleProfile::from_sample(&sample), truth.as_ref())?;

    let mut out = io::stdout().lock();
    for (x, v) in q.probs().iter().enumerate() {
        writeln!(out, "{}\t{}", x + 1, format_significant(*v, CSV_DIGITS)).map_err(|e| Failure::io(e.to_string()))?;
    }
    Ok(())
}

fn exact(args: ExactArgs) -> Result<(), Failure> {
    let estimator = EstimatorSpec::parse(&args.estimator)?;
    let p = resolve_truth(&args.truth, args.k)?.ok_or_else(|| Failure::usage("exact needs --dist (with --k) or --p"))?;
    let result = exact_expected_kl(&p, &estimator, args.n)?;
    println!("{}", format_significant(result.expected_kl, 12));
    Ok(())
}
