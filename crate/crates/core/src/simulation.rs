//! Seeded Monte Carlo estimation of expected KL loss.
//!
//! Trial `i` of every cell draws from the stream
//! `RngSeed { seed: master_seed, stream_id: i }`: first the true
//! distribution when the source is a prior, then the `n` sample symbols.
//! All estimators of a cell are scored on the same per-trial samples
//! (paired comparison). Per-trial losses are collected in trial order and
//! reduced sequentially, so records do not depend on thread count.

use serde::{Deserialize, Serialize};

use crate::distributions::{CategoricalSampler, Distribution, DistributionSource, NamedDistribution, RngSeed};
use crate::divergence::kl;
use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorSpec};
use crate::exec::Execution;
use crate::profile::SampleProfile;

/// Stream used for the single prior draw when priors are not redrawn.
pub const FIXED_PRIOR_STREAM: u64 = u64::MAX;

/// Name recorded for distributions passed in directly rather than by name.
pub const CUSTOM_DISTRIBUTION: &str = "custom";

/// One aggregated (distribution, estimator, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub distribution: String,
    pub estimator: String,
    pub k: usize,
    pub n: u64,
    pub trials: u64,
    /// Mean KL loss in nats; `+∞` iff `inf_trials > 0`.
    #[serde(with = "extended_real")]
    pub mean_kl: f64,
    /// Sample standard deviation of the finite trial losses over `√trials`.
    pub stderr: f64,
    pub inf_trials: u64,
    pub master_seed: u64,
}

/// Serializes `+∞` as the string `"inf"` so JSON output stays valid.
mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s}"))),
        }
    }
}

/// Summary statistics of one estimator over a cell's trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub mean_kl: f64,
    pub stderr: f64,
    pub inf_trials: u64,
}

impl TrialSummary {
    /// Reduces losses in the given order.
    pub fn from_losses(losses: impl Iterator<Item = f64> + Clone, trials: u64) -> Self {
        let mut finite = 0u64;
        let mut sum = 0.0;
        let mut inf_trials = 0u64;
        for v in losses.clone() {
            if v.is_finite() {
                finite += 1;
                sum += v;
            } else {
                inf_trials += 1;
            }
        }
        let finite_mean = if finite > 0 { sum / finite as f64 } else { 0.0 };
        let stderr = if finite >= 2 {
            let ss: f64 = losses.filter(|v| v.is_finite()).map(|v| (v - finite_mean).powi(2)).sum();
            (ss / (finite - 1) as f64).sqrt() / (trials as f64).sqrt()
        } else {
            0.0
        };
        let mean_kl = if inf_trials > 0 { f64::INFINITY } else { finite_mean };
        TrialSummary { mean_kl, stderr, inf_trials }
    }
}

/// Runs `trials` paired trials of every estimator against `source`.
/// Returns one summary per estimator, in order.
pub fn simulate_cell<E: Estimator>(
    source: &DistributionSource,
    estimators: &[E],
    n: u64,
    trials: u64,
    master_seed: u64,
    exec: Execution,
) -> Result<Vec<TrialSummary>> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    let fixed = match source {
        DistributionSource::Fixed(p) => Some((p, CategoricalSampler::new(p)?)),
        DistributionSource::Dirichlet { .. } => None,
    };

    let run_trial = |i: usize| -> Result<Vec<f64>> {
        let mut rng = RngSeed::new(master_seed, i as u64).rng();
        let drawn;
        let (p, counts) = match &fixed {
            Some((p, sampler)) => (*p, sampler.draw_counts(n as usize, &mut rng)),
            None => {
                drawn = source.realize(&mut rng)?;
                let counts = CategoricalSampler::new(&drawn)?.draw_counts(n as usize, &mut rng);
                (&drawn, counts)
            }
        };
        let profile = SampleProfile::from_counts(counts);
        estimators
            .iter()
            .map(|e| kl(p, &e.estimate(&profile, Some(p))?))
            .collect()
    };
    let losses = exec.try_map_indexed(trials as usize, run_trial)?;

    Ok((0..estimators.len())
        .map(|j| TrialSummary::from_losses(losses.iter().map(move |trial| trial[j]), trials))
        .collect())
}

/// Expected KL regret of a single estimator against a fixed `p`.
pub fn monte_carlo_regret<E: Estimator>(
    p: &Distribution,
    estimator: &E,
    n: u64,
    trials: u64,
    master_seed: u64,
) -> Result<RegretRecord> {
    monte_carlo_regret_with(p, estimator, n, trials, master_seed, Execution::default())
}

pub fn monte_carlo_regret_with<E: Estimator>(
    p: &Distribution,
    estimator: &E,
    n: u64,
    trials: u64,
    master_seed: u64,
    exec: Execution,
) -> Result<RegretRecord> {
    let source = DistributionSource::Fixed(p.clone());
    let s = simulate_cell(&source, std::slice::from_ref(estimator), n, trials, master_seed, exec)?[0];
    Ok(RegretRecord {
        distribution: CUSTOM_DISTRIBUTION.to_string(),
        estimator: estimator.name(),
        k: p.k(),
        n,
        trials,
        mean_kl: s.mean_kl,
        stderr: s.stderr,
        inf_trials: s.inf_trials,
        master_seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n_grid: Vec<u64>,
    pub trials: u64,
    pub master_seed: u64,
    pub distributions: Vec<String>,
    pub estimators: Vec<String>,
    /// Draw a fresh distribution from Dirichlet priors on every trial.
    /// When false, one draw (stream [`FIXED_PRIOR_STREAM`]) serves all trials.
    pub redraw_prior_per_trial: bool,
}

impl ExperimentConfig {
    /// Full-scale grid: every named distribution and the five compared
    /// estimators at `k = 10000`, ten sample sizes from 1000 to 50000.
    pub fn figure_grid(trials: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            k: 10_000,
            n_grid: linear_grid(1000, 50_000, 10).expect("static grid"),
            trials,
            master_seed,
            distributions: ["uniform", "step", "zipf1", "zipf1.5", "dir1", "dir0.5"].map(String::from).to_vec(),
            estimators: ["laplace", "kt", "braess-sauer", "competitive", "best-natural"].map(String::from).to_vec(),
            redraw_prior_per_trial: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("n grid must be strictly increasing: {:?}", self.n_grid)));
        }
        Ok(())
    }

    /// Number of records [`run_experiment`] will emit.
    pub fn cells(&self) -> usize {
        self.distributions.len() * self.estimators.len() * self.n_grid.len()
    }
}

/// `count` integers evenly spaced from `start` to `stop` inclusive,
/// rounded to nearest.
pub fn linear_grid(start: u64, stop: u64, count: usize) -> Result<Vec<u64>> {
    match count {
        0 => Err(Error::Config("grid needs at least one point".into())),
        1 if start == stop => Ok(vec![start]),
        1 => Err(Error::Config("a one-point grid needs start == stop".into())),
        _ => {
            if stop <= start {
                return Err(Error::Config(format!("grid stop {stop} must exceed start {start}")));
            }
            let step = (stop - start) as f64 / (count - 1) as f64;
            let grid: Vec<u64> = (0..count).map(|i| (start as f64 + step * i as f64).round() as u64).collect();
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!("{count} points do not fit strictly between {start} and {stop}")));
            }
            Ok(grid)
        }
    }
}

/// Evaluates every (distribution, estimator, n) cell. Records are ordered
/// by distribution, then estimator, then n, following the config's lists.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RegretRecord>> {
    run_experiment_with(config, Execution::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, exec: Execution) -> Result<Vec<RegretRecord>> {
    config.validate()?;
    let distributions: Vec<NamedDistribution> =
        config.distributions.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let estimators: Vec<EstimatorSpec> = config.estimators.iter().map(|s| s.parse()).collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(config.cells());
    for (dist_name, dist) in config.distributions.iter().zip(&distributions) {
        let mut source = dist.source(config.k)?;
        if let (false, DistributionSource::Dirichlet { .. }) = (config.redraw_prior_per_trial, &source) {
            let mut rng = RngSeed::new(config.master_seed, FIXED_PRIOR_STREAM).rng();
            source = DistributionSource::Fixed(source.realize(&mut rng)?);
        }
        let mut by_n = Vec::with_capacity(config.n_grid.len());
        for &n in &config.n_grid {
            by_n.push(simulate_cell(&source, &estimators, n, config.trials, config.master_seed, exec)?);
        }
        for (j, est_name) in config.estimators.iter().enumerate() {
            for (&n, summaries) in config.n_grid.iter().zip(&by_n) {
                let s = summaries[j];
                records.push(RegretRecord {
                    distribution: dist_name.clone(),
                    estimator: est_name.clone(),
                    k: config.k,
                    n,
                    trials: config.trials,
                    mean_kl: s.mean_kl,
                    stderr: s.stderr,
                    inf_trials: s.inf_trials,
                    master_seed: config.master_seed,
                });
            }
        }
    }
    Ok(records)
}
