//! Test-only helpers: independent random inputs, randomized estimators and
//! a raw-sequence enumerator that does not share code with the oracle.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cde_core::divergence::kl;
use cde_core::{Distribution, Estimator, Result, Sample, SampleProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic value in `[lo, hi)` keyed by `parts`.
pub fn hashed_unit(parts: &[u64], lo: f64, hi: f64) -> f64 {
    let h = parts.iter().fold(0x1234_5678u64, |acc, &v| splitmix64(acc ^ v));
    lo + (hi - lo) * ((h >> 11) as f64 / (1u64 << 53) as f64)
}

/// Random point of the simplex via normalized exponentials; occasionally
/// zeroes one coordinate to exercise partial support.
pub fn random_distribution<R: Rng>(rng: &mut R, k: usize) -> Distribution {
    let mut w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    if k > 1 && rng.random::<f64>() < 0.15 {
        let i = rng.random_range(0..k);
        w[i] = 0.0;
    }
    Distribution::from_weights(w).unwrap()
}

pub fn random_full_support<R: Rng>(rng: &mut R, k: usize) -> Distribution {
    let w: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    Distribution::from_weights(w).unwrap()
}

pub fn random_sample<R: Rng>(rng: &mut R, p: &Distribution, n: usize) -> Sample {
    // Inverse-CDF sampling, independent of the library's alias sampler.
    let cdf: Vec<f64> = p
        .probs()
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let symbols = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * cdf[cdf.len() - 1];
            let mut x = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
            while p.probs()[x] == 0.0 {
                x -= 1;
            }
            x + 1
        })
        .collect();
    Sample::new(symbols, p.k()).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, k: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Natural estimator whose class weight is a hash of `(seed, t, Φ_t)`.
#[derive(Debug, Clone, Copy)]
pub struct HashedNatural(pub u64);

impl Estimator for HashedNatural {
    fn name(&self) -> String {
        format!("hashed-natural-{}", self.0)
    }

    fn estimate(&self, profile: &SampleProfile, _: Option<&Distribution>) -> Result<Distribution> {
        let class: BTreeMap<u64, f64> = profile
            .prevalences()
            .filter(|&(_, phi)| phi > 0)
            .map(|(t, phi)| (t, hashed_unit(&[self.0, t, phi], 0.05, 2.0) * (t as f64 + 0.3)))
            .collect();
        Distribution::from_weights(profile.counts().iter().map(|c| class[c]).collect())
    }
}

/// Non-natural estimator: weights depend on the symbol label too.
#[derive(Debug, Clone, Copy)]
pub struct HashedLabelled(pub u64);

impl Estimator for HashedLabelled {
    fn name(&self) -> String {
        format!("hashed-labelled-{}", self.0)
    }

    fn estimate(&self, profile: &SampleProfile, _: Option<&Distribution>) -> Result<Distribution> {
        let w = profile
            .counts()
            .iter()
            .enumerate()
            .map(|(x, &c)| hashed_unit(&[self.0, x as u64, c], 0.05, 2.0) * (c as f64 + 0.5))
            .collect();
        Distribution::from_weights(w)
    }
}

/// Expected KL by walking all `kⁿ` raw sequences.
pub fn raw_sequence_expected_kl<E: Estimator + ?Sized>(p: &Distribution, est: &E, n: usize) -> f64 {
    let k = p.k();
    let mut seq = vec![1usize; n];
    let mut total = 0.0;
    loop {
        let prob: f64 = seq.iter().map(|&x| p.prob(x)).product();
        if prob > 0.0 {
            let sample = Sample::new(seq.clone(), k).unwrap();
            let q = est.estimate(&SampleProfile::from_sample(&sample), Some(p)).unwrap();
            total += prob * kl(p, &q).unwrap();
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return total;
            }
            seq[i] += 1;
            if seq[i] <= k {
                break;
            }
            seq[i] = 1;
            i += 1;
        }
    }
}

pub fn preset_estimators() -> Vec<cde_core::EstimatorSpec> {
    ["laplace", "kt", "braess-sauer", "competitive", "best-natural", "perm-oracle"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}
