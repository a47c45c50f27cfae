//! Sufficient statistics of a sample for natural estimators: multiplicities
//! `n(x)`, prevalences `Φ_t` and combined masses `S_t`.

use std::collections::BTreeMap;

use crate::distributions::{Distribution, Sample};
use crate::error::{Error, Result};

/// Multiplicities and prevalences of a sample over `[k]`.
///
/// Prevalences are kept sparsely: `Φ_0` is always present (possibly 0),
/// other `t` only when `Φ_t > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleProfile {
    n: u64,
    counts: Vec<u64>,
    prevalence: BTreeMap<u64, u64>,
}

impl SampleProfile {
    pub fn from_sample(sample: &Sample) -> Self {
        let mut counts = vec![0u64; sample.alphabet_size()];
        for &x in sample.symbols() {
            counts[x - 1] += 1;
        }
        Self::from_counts(counts)
    }

    /// Builds a profile from 0-indexed per-symbol counts. Panics on an
    /// empty vector.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        assert!(!counts.is_empty(), "alphabet size must be >= 1");
        let mut prevalence = BTreeMap::new();
        prevalence.insert(0, 0);
        let mut n = 0;
        for &c in &counts {
            *prevalence.entry(c).or_insert(0) += 1;
            n += c;
        }
        SampleProfile { n, counts, prevalence }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// 0-indexed multiplicities.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Multiplicity of the 1-indexed symbol `x`.
    pub fn count(&self, x: usize) -> u64 {
        self.counts[x - 1]
    }

    /// `Φ_t`, zero for unrealized `t`.
    pub fn prevalence(&self, t: u64) -> u64 {
        self.prevalence.get(&t).copied().unwrap_or(0)
    }

    /// `(t, Φ_t)` pairs in increasing `t`: `t = 0` first, then every
    /// realized positive multiplicity.
    pub fn prevalences(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.prevalence.iter().map(|(&t, &phi)| (t, phi))
    }

    pub fn distinct_observed(&self) -> usize {
        self.k() - self.prevalence(0) as usize
    }
}

pub fn build_profile(sample: &Sample) -> SampleProfile {
    SampleProfile::from_sample(sample)
}

/// `S_t`: total probability, under some vector, of the symbols that appear
/// exactly `t` times. Keyed by the profile's prevalence support.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedMass {
    mass: BTreeMap<u64, f64>,
}

impl CombinedMass {
    pub fn from_map(mass: BTreeMap<u64, f64>) -> Self {
        CombinedMass { mass }
    }

    /// `S_t`, zero for `t` outside the support.
    pub fn get(&self, t: u64) -> f64 {
        self.mass.get(&t).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.mass.iter().map(|(&t, &s)| (t, s))
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }
}

/// Groups the entries of `v` by the profile's count classes. Applied to the
/// true `p` this is `S`; applied to an estimate `q` it is `Ŝ`.
pub fn combined_mass(v: &Distribution, profile: &SampleProfile) -> Result<CombinedMass> {
    if v.k() != profile.k() {
        return Err(Error::invalid(format!(
            "distribution has k = {}, profile has k = {}",
            v.k(),
            profile.k()
        )));
    }
    let mut mass: BTreeMap<u64, f64> = profile.prevalences().map(|(t, _)| (t, 0.0)).collect();
    for (&c, &px) in profile.counts().iter().zip(v.probs()) {
        *mass.get_mut(&c).expect("every count is a prevalence key") += px;
    }
    Ok(CombinedMass { mass })
}
