//! Probability vectors over `[k]`, the experiment distributions, and seeded
//! sampling.
//!
//! Symbols are 1-indexed in [`Sample`] and in every file format; internally
//! vectors are 0-indexed, so symbol `x` lives at `probs[x - 1]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution as _, Gamma};

use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p = 1` accepted by [`Distribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector over the alphabet `[k]`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates that every entry is finite and nonnegative and that the
    /// entries sum to 1 within [`SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution must have k >= 1 entries"));
        }
        if let Some((i, v)) = probs.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("probability of symbol {} is {v}", i + 1)));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Distribution { probs })
    }

    /// Normalizes nonnegative weights with a positive finite total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::invalid(format!("weights sum to {total}")));
        }
        Distribution::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of the 1-indexed symbol `x`.
    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x - 1]
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// The relabeled distribution `p'` with `p'[perm[i]] = p[i]`
    /// (0-indexed permutation).
    pub fn permuted(&self, perm: &[usize]) -> Distribution {
        assert_eq!(perm.len(), self.k(), "permutation length mismatch");
        let mut out = vec![0.0; self.k()];
        for (i, &j) in perm.iter().enumerate() {
            out[j] = self.probs[i];
        }
        Distribution { probs: out }
    }

    pub(crate) fn from_probs_unchecked(probs: Vec<f64>) -> Distribution {
        Distribution { probs }
    }
}

/// Pseudo-random stream selector.
///
/// The stream is ChaCha8 keyed by `seed` (expanded with
/// `SeedableRng::seed_from_u64`) and with its 64-bit stream counter set to
/// `stream_id`. Simulation trial `i` always uses `stream_id = i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngSeed { seed, stream_id }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// A sequence of 1-indexed symbols drawn from `[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    symbols: Vec<usize>,
    alphabet_size: usize,
}

impl Sample {
    pub fn new(symbols: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::invalid("alphabet size must be >= 1"));
        }
        if let Some(bad) = symbols.iter().find(|&&x| x == 0 || x > alphabet_size) {
            return Err(Error::invalid(format!(
                "symbol {bad} outside [1..{alphabet_size}]"
            )));
        }
        Ok(Sample { symbols, alphabet_size })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Applies a 0-indexed relabeling: symbol `x` becomes `perm[x - 1] + 1`.
    pub fn relabeled(&self, perm: &[usize]) -> Sample {
        assert_eq!(perm.len(), self.alphabet_size, "permutation length mismatch");
        Sample {
            symbols: self.symbols.iter().map(|&x| perm[x - 1] + 1).collect(),
            alphabet_size: self.alphabet_size,
        }
    }
}

pub fn uniform(k: usize) -> Result<Distribution> {
    if k == 0 {
        return Err(Error::invalid("uniform requires k >= 1"));
    }
    Ok(Distribution { probs: vec![1.0 / k as f64; k] })
}

/// First half of the symbols get `1/(2k)`, second half `3/(2k)`.
pub fn step(k: usize) -> Result<Distribution> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::invalid(format!("step requires an even k >= 2, got {k}")));
    }
    let lo = 1.0 / (2.0 * k as f64);
    let hi = 3.0 / (2.0 * k as f64);
    let probs = (0..k).map(|i| if i < k / 2 { lo } else { hi }).collect();
    Ok(Distribution { probs })
}

/// `p(i) ∝ i^{-s}` for `i = 1..k`.
pub fn zipf(k: usize, s: f64) -> Result<Distribution> {
    if k == 0 {
        return Err(Error::invalid("zipf requires k >= 1"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("zipf exponent must be positive, got {s}")));
    }
    let weights: Vec<f64> = (1..=k).map(|i| (i as f64).powf(-s)).collect();
    // Summing smallest-first keeps the harmonic-type sum accurate for large k.
    let total: f64 = weights.iter().rev().sum();
    Ok(Distribution { probs: weights.into_iter().map(|w| w / total).collect() })
}

/// One draw from the symmetric Dirichlet(α, …, α) on `[k]`, realized as
/// normalized Gamma(α, 1) variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Result<Distribution> {
    if k == 0 {
        return Err(Error::invalid("dirichlet requires k >= 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("dirichlet alpha must be positive, got {alpha}")));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::invalid(e.to_string()))?;
    let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::invalid(format!(
            "gamma draws underflowed for alpha = {alpha}; use a larger alpha"
        )));
    }
    Ok(Distribution { probs: draws.into_iter().map(|g| g / total).collect() })
}

pub fn sample_dirichlet_seeded(k: usize, alpha: f64, seed: RngSeed) -> Result<Distribution> {
    sample_dirichlet(k, alpha, &mut seed.rng())
}

/// O(1)-per-draw categorical sampler (Walker alias table).
#[derive(Debug, Clone)]
pub struct CategoricalSampler {
    alias: WeightedAliasIndex<f64>,
    k: usize,
}

impl CategoricalSampler {
    pub fn new(p: &Distribution) -> Result<Self> {
        let alias = WeightedAliasIndex::new(p.probs.clone())
            .map_err(|e| Error::invalid(format!("cannot build sampler: {e}")))?;
        Ok(CategoricalSampler { alias, k: p.k() })
    }

    /// Draws a 0-indexed symbol.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.alias.sample(rng)
    }

    /// Multiplicities of `n` draws, without materializing the sequence.
    /// Consumes the stream identically to [`draw_symbols`](Self::draw_symbols).
    pub fn draw_counts<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<u64> {
        let mut counts = vec![0u64; self.k];
        for _ in 0..n {
            counts[self.draw(rng)] += 1;
        }
        counts
    }

    /// `n` 1-indexed symbols.
    pub fn draw_symbols<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| self.draw(rng) + 1).collect()
    }
}

/// `n` i.i.d. draws from `p` using the stream selected by `seed`.
pub fn draw_sample(p: &Distribution, n: usize, seed: RngSeed) -> Result<Sample> {
    let sampler = CategoricalSampler::new(p)?;
    let symbols = sampler.draw_symbols(n, &mut seed.rng());
    Ok(Sample { symbols, alphabet_size: p.k() })
}

/// A distribution given by name: `uniform`, `step`, `zipf1`, `zipf1.5`,
/// `dir1`, `dir0.5`, `zipf:<s>` or `dirichlet:<alpha>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedDistribution {
    Uniform,
    Step,
    Zipf(f64),
    /// Symmetric Dirichlet prior; each realization is a random draw.
    Dirichlet(f64),
}

impl NamedDistribution {
    pub fn is_prior(&self) -> bool {
        matches!(self, NamedDistribution::Dirichlet(_))
    }

    /// The random source this name denotes at alphabet size `k`.
    pub fn source(&self, k: usize) -> Result<DistributionSource> {
        Ok(match *self {
            NamedDistribution::Uniform => DistributionSource::Fixed(uniform(k)?),
            NamedDistribution::Step => DistributionSource::Fixed(step(k)?),
            NamedDistribution::Zipf(s) => DistributionSource::Fixed(zipf(k, s)?),
            NamedDistribution::Dirichlet(alpha) => {
                if k == 0 || !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!("dirichlet({alpha}) over k = {k}")));
                }
                DistributionSource::Dirichlet { k, alpha }
            }
        })
    }
}

impl FromStr for NamedDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownName { kind: "distribution", name: s.to_string() };
        let positive = |v: &str| -> Result<f64> {
            match v.parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                _ => Err(unknown()),
            }
        };
        match s {
            "uniform" => Ok(NamedDistribution::Uniform),
            "step" => Ok(NamedDistribution::Step),
            "zipf1" => Ok(NamedDistribution::Zipf(1.0)),
            "zipf1.5" => Ok(NamedDistribution::Zipf(1.5)),
            "dir1" => Ok(NamedDistribution::Dirichlet(1.0)),
            "dir0.5" => Ok(NamedDistribution::Dirichlet(0.5)),
            _ => {
                if let Some(v) = s.strip_prefix("zipf:") {
                    positive(v).map(NamedDistribution::Zipf)
                } else if let Some(v) = s.strip_prefix("dirichlet:") {
                    positive(v).map(NamedDistribution::Dirichlet)
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

impl fmt::Display for NamedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedDistribution::Uniform => f.write_str("uniform"),
            NamedDistribution::Step => f.write_str("step"),
            NamedDistribution::Zipf(1.0) => f.write_str("zipf1"),
            NamedDistribution::Zipf(1.5) => f.write_str("zipf1.5"),
            NamedDistribution::Zipf(s) => write!(f, "zipf:{s}"),
            NamedDistribution::Dirichlet(1.0) => f.write_str("dir1"),
            NamedDistribution::Dirichlet(0.5) => f.write_str("dir0.5"),
            NamedDistribution::Dirichlet(a) => write!(f, "dirichlet:{a}"),
        }
    }
}

/// Where a trial's true distribution comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSource {
    Fixed(Distribution),
    /// A fresh symmetric Dirichlet draw per realization.
    Dirichlet { k: usize, alpha: f64 },
}

impl DistributionSource {
    pub fn k(&self) -> usize {
        match self {
            DistributionSource::Fixed(p) => p.k(),
            DistributionSource::Dirichlet { k, .. } => *k,
        }
    }

    /// Resolves to a concrete distribution, consuming randomness only for
    /// priors.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Distribution> {
        match self {
            DistributionSource::Fixed(p) => Ok(p.clone()),
            DistributionSource::Dirichlet { k, alpha } => sample_dirichlet(*k, *alpha, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(p: &Distribution) {
        assert!(p.probs().iter().all(|&v| v >= 0.0));
        let sum: f64 = p.probs().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9, "sum = {sum}");
    }

    #[test]
    fn uniform_values() {
        assert_eq!(uniform(4).unwrap().probs(), &[0.25; 4]);
        assert_eq!(uniform(1).unwrap().probs(), &[1.0]);
        let big = uniform(10_000).unwrap();
        assert!(big.probs().iter().all(|&v| v == 1e-4));
        assert_valid(&big);
        assert!(matches!(uniform(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn step_values() {
        assert_eq!(step(4).unwrap().probs(), &[0.125, 0.125, 0.375, 0.375]);
        assert_eq!(step(2).unwrap().probs(), &[0.25, 0.75]);
        assert!(step(3).is_err());
        assert!(step(0).is_err());
    }

    #[test]
    fn zipf_values() {
        let p = zipf(3, 1.0).unwrap();
        for (got, want) in p.probs().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(zipf(1, 2.7).unwrap().probs(), &[1.0]);
        let p = zipf(3, 1.5).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(zipf(3, 0.0).is_err());
    }

    #[test]
    fn constructors_valid_on_grid() {
        for k in [1usize, 2, 3, 10, 100, 10_000] {
            assert_valid(&uniform(k).unwrap());
            assert_valid(&zipf(k, 1.0).unwrap());
            assert_valid(&zipf(k, 1.5).unwrap());
            if k % 2 == 0 {
                assert_valid(&step(k).unwrap());
            }
            for alpha in [0.5, 1.0] {
                assert_valid(&sample_dirichlet_seeded(k, alpha, RngSeed::new(3, k as u64)).unwrap());
            }
            let p = zipf(k, 1.0).unwrap();
            assert!(p.probs().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn dirichlet_means() {
        let mut rng = RngSeed::new(11, 0).rng();
        let draws = 100_000;
        let mean: f64 =
            (0..draws).map(|_| sample_dirichlet(2, 1.0, &mut rng).unwrap().probs()[0]).sum::<f64>() / draws as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean = {mean}");

        let mut acc = [0.0; 5];
        for _ in 0..draws {
            let p = sample_dirichlet(5, 0.5, &mut rng).unwrap();
            for (a, v) in acc.iter_mut().zip(p.probs()) {
                *a += v;
            }
        }
        for a in acc {
            assert!((a / draws as f64 - 0.2).abs() < 0.01);
        }
    }

    #[test]
    fn draw_sample_cases() {
        let point = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(draw_sample(&point, 5, RngSeed::new(1, 2)).unwrap().symbols(), &[1; 5]);
        assert!(draw_sample(&point, 0, RngSeed::new(1, 2)).unwrap().is_empty());

        let p = uniform(4).unwrap();
        let s = draw_sample(&p, 1_000_000, RngSeed::new(99, 0)).unwrap();
        let mut counts = [0usize; 4];
        for &x in s.symbols() {
            counts[x - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e6 - 0.25).abs() < 0.005);
        }
    }

    #[test]
    fn draws_are_deterministic_per_stream() {
        let p = zipf(50, 1.0).unwrap();
        let a = draw_sample(&p, 500, RngSeed::new(5, 7)).unwrap();
        let b = draw_sample(&p, 500, RngSeed::new(5, 7)).unwrap();
        let c = draw_sample(&p, 500, RngSeed::new(5, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);

        let sampler = CategoricalSampler::new(&p).unwrap();
        let counts = sampler.draw_counts(500, &mut RngSeed::new(5, 7).rng());
        let mut expected = vec![0u64; 50];
        for &x in a.symbols() {
            expected[x - 1] += 1;
        }
        assert_eq!(counts, expected);
    }

    #[test]
    fn names_round_trip() {
        for name in ["uniform", "step", "zipf1", "zipf1.5", "dir1", "dir0.5", "zipf:2", "dirichlet:0.25"] {
            let parsed: NamedDistribution = name.parse().unwrap();
            assert_eq!(parsed.to_string(), name);
        }
        let err = "gaussian".parse::<NamedDistribution>().unwrap_err();
        assert!(err.to_string().contains("gaussian"));
        assert!("zipf:-1".parse::<NamedDistribution>().is_err());
    }

    #[test]
    fn validation_rejects_bad_vectors() {
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Sample::new(vec![1, 4], 3).is_err());
        assert!(Sample::new(vec![0], 3).is_err());
    }

    #[test]
    fn permuted_moves_mass() {
        let p = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(p.permuted(&[1, 0, 2]).probs(), &[0.3, 0.5, 0.2]);
        assert_eq!(p.permuted(&[2, 0, 1]).probs(), &[0.3, 0.2, 0.5]);
    }
}
