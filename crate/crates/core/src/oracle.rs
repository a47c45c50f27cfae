//! Exact expected losses by enumeration.
//!
//! Every estimator in this crate is a function of the count vector, so the
//! expectation over all `kⁿ` sequences is computed over the
//! `C(n+k−1, k−1)` count vectors instead, each weighted by its multinomial
//! probability. Work is split by the first coordinate and the partial sums
//! are reduced in a fixed order, so results are bit-stable whether or not
//! the enumeration runs in parallel.

use crate::distributions::Distribution;
use crate::divergence::{entropy, kl};
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::exec::Execution;
use crate::profile::{combined_mass, SampleProfile};

/// Default bound on the number of count vectors one enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Largest alphabet for which [`exact_class_regret`] enumerates relabelings.
pub const CLASS_REGRET_MAX_K: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResult {
    /// `E[D(p‖q_{Xⁿ})]` in nats; `+∞` if any reachable sample yields an
    /// infinite loss.
    pub expected_kl: f64,
    /// Count vectors with positive probability that were evaluated.
    pub sequences_enumerated: u64,
    /// Total probability of the evaluated count vectors (1 up to rounding).
    pub mass_covered: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub cap: u64,
    pub execution: Execution,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { cap: DEFAULT_ENUMERATION_CAP, execution: Execution::default() }
    }
}

/// `C(n+k−1, k−1)`, saturating at `u64::MAX`.
pub fn count_vectors(k: usize, n: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    // C(n + r, r) with r = k - 1, built up as exact integer prefixes.
    let r = (k - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = match acc.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u64::MAX,
        };
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

struct Enumeration<'a> {
    ln_p: Vec<f64>,
    ln_fact: Vec<f64>,
    p: &'a Distribution,
    n: u64,
}

impl<'a> Enumeration<'a> {
    fn new(p: &'a Distribution, n: u64, opts: &EnumerationOptions) -> Result<Self> {
        let vectors = count_vectors(p.k(), n);
        if vectors > opts.cap {
            return Err(Error::Capacity(format!(
                "k = {}, n = {n} needs {} count vectors; cap is {}",
                p.k(),
                if vectors == u64::MAX { "more than 2^64".to_string() } else { vectors.to_string() },
                opts.cap
            )));
        }
        let mut ln_fact = Vec::with_capacity(n as usize + 1);
        let mut acc = 0.0f64;
        ln_fact.push(0.0);
        for i in 1..=n {
            acc += (i as f64).ln();
            ln_fact.push(acc);
        }
        Ok(Enumeration { ln_p: p.probs().iter().map(|v| v.ln()).collect(), ln_fact, p, n })
    }

    /// Multinomial probability of a count vector; 0 when it puts counts on
    /// a zero-probability symbol.
    fn probability(&self, counts: &[u64]) -> f64 {
        let mut ln = self.ln_fact[self.n as usize];
        for (&c, &lp) in counts.iter().zip(&self.ln_p) {
            if c > 0 {
                if lp == f64::NEG_INFINITY {
                    return 0.0;
                }
                ln += c as f64 * lp - self.ln_fact[c as usize];
            }
        }
        ln.exp()
    }

    /// Sums `prob · f(profile)` over all count vectors with positive
    /// probability, returning `(sum, vectors visited, mass)`.
    fn expectation<F>(&self, exec: Execution, f: F) -> Result<(f64, u64, f64)>
    where
        F: Fn(&SampleProfile) -> Result<f64> + Sync + Send,
    {
        let k = self.p.k();
        let n = self.n;
        let first_values: Vec<u64> = if k == 1 { vec![n] } else { (0..=n).collect() };
        let chunks = exec.try_map_indexed(first_values.len(), |i| {
            let mut counts = vec![0u64; k];
            counts[0] = first_values[i];
            let mut acc = (0.0, 0u64, 0.0);
            self.visit(&mut counts, 1, n - first_values[i], &f, &mut acc)?;
            Ok::<_, Error>(acc)
        })?;
        Ok(chunks
            .into_iter()
            .fold((0.0, 0, 0.0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2)))
    }

    fn visit<F>(&self, counts: &mut Vec<u64>, pos: usize, remaining: u64, f: &F, acc: &mut (f64, u64, f64)) -> Result<()>
    where
        F: Fn(&SampleProfile) -> Result<f64>,
    {
        if pos + 1 >= counts.len() {
            if pos < counts.len() {
                counts[pos] = remaining;
            } else if remaining != 0 {
                return Ok(());
            }
            let prob = self.probability(counts);
            if prob > 0.0 {
                let value = f(&SampleProfile::from_counts(counts.clone()))?;
                acc.0 += prob * value;
                acc.1 += 1;
                acc.2 += prob;
            }
            return Ok(());
        }
        for c in 0..=remaining {
            counts[pos] = c;
            self.visit(counts, pos + 1, remaining - c, f, acc)?;
        }
        counts[pos] = 0;
        Ok(())
    }
}

/// `E[D(p‖q_{Xⁿ})]` for `Xⁿ` i.i.d. from `p`, with the default cap.
pub fn exact_expected_kl<E: Estimator + ?Sized>(p: &Distribution, estimator: &E, n: u64) -> Result<ExactResult> {
    exact_expected_kl_with(p, estimator, n, &EnumerationOptions::default())
}

pub fn exact_expected_kl_with<E: Estimator + ?Sized>(
    p: &Distribution,
    estimator: &E,
    n: u64,
    opts: &EnumerationOptions,
) -> Result<ExactResult> {
    let en = Enumeration::new(p, n, opts)?;
    let (sum, visited, mass) = en.expectation(opts.execution, |profile| {
        let q = estimator.estimate(profile, Some(p))?;
        kl(p, &q)
    })?;
    Ok(ExactResult { expected_kl: sum, sequences_enumerated: visited, mass_covered: mass })
}

/// Least expected loss of any natural estimator that knows `p`:
/// `E[Σ_t S_t ln(Φ_t/S_t)] − H(p)`.
///
/// Evaluated directly from `S` and `Φ`, not through an estimate, so it can
/// serve as an independent check on the best-natural estimator.
pub fn exact_natural_regret(p: &Distribution, n: u64) -> Result<f64> {
    exact_natural_regret_with(p, n, &EnumerationOptions::default())
}

pub fn exact_natural_regret_with(p: &Distribution, n: u64, opts: &EnumerationOptions) -> Result<f64> {
    let en = Enumeration::new(p, n, opts)?;
    let (sum, _, _) = en.expectation(opts.execution, |profile| {
        let s = combined_mass(p, profile)?;
        Ok(s.iter()
            .filter(|&(_, st)| st > 0.0)
            .map(|(t, st)| st * (profile.prevalence(t) as f64 / st).ln())
            .sum())
    })?;
    // Rounding can leave a value a few ulps below zero.
    Ok((sum - entropy(p)).max(0.0))
}

/// Worst case of [`exact_expected_kl`] over every relabeling of `p`.
pub fn exact_class_regret<E: Estimator + ?Sized>(p: &Distribution, estimator: &E, n: u64) -> Result<f64> {
    exact_class_regret_with(p, estimator, n, &EnumerationOptions::default())
}

pub fn exact_class_regret_with<E: Estimator + ?Sized>(
    p: &Distribution,
    estimator: &E,
    n: u64,
    opts: &EnumerationOptions,
) -> Result<f64> {
    if p.k() > CLASS_REGRET_MAX_K {
        return Err(Error::Capacity(format!(
            "class regret enumerates k! relabelings; k = {} exceeds {CLASS_REGRET_MAX_K}",
            p.k()
        )));
    }
    let mut worst = 0.0f64;
    for q in distinct_relabelings(p) {
        let r = exact_expected_kl_with(&q, estimator, n, opts)?.expected_kl;
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Every distinct relabeling of `p`, in lexicographic order of the value
/// ranks.
pub fn distinct_relabelings(p: &Distribution) -> Vec<Distribution> {
    let mut values: Vec<f64> = p.probs().to_vec();
    values.sort_by(|a, b| a.total_cmp(b));
    let mut out = vec![Distribution::from_probs_unchecked(values.clone())];
    // Lexicographic next-permutation over the multiset skips duplicates.
    while let Some(i) = values.windows(2).rposition(|w| w[0] < w[1]) {
        let j = values.iter().rposition(|&v| v > values[i]).expect("pivot has a successor");
        values.swap(i, j);
        values[i + 1..].reverse();
        out.push(Distribution::from_probs_unchecked(values.clone()));
    }
    out
}
