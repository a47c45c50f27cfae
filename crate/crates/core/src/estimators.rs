//! Distribution estimators.
//!
//! Every estimator here except [`permutation_oracle`] is computed once per
//! count class and then broadcast to symbols, so natural estimators give
//! bit-identical probabilities to symbols with equal multiplicity.
//!
//! Oracle estimators ([`best_natural`], [`permutation_oracle`]) need the
//! true distribution and fail with [`Error::InvalidParameter`] without it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::distributions::{Distribution, Sample};
use crate::error::{Error, Result};
use crate::profile::{combined_mass, SampleProfile};

/// Largest alphabet accepted by [`permutation_oracle`]; the cost is
/// `O(k!·k)`.
pub const PERMUTATION_ORACLE_MAX_K: usize = 6;

/// Anything that maps a sample profile (and, for oracles, the true
/// distribution) to an estimate.
pub trait Estimator: Sync {
    fn name(&self) -> String;

    fn requires_true_p(&self) -> bool {
        false
    }

    fn estimate(&self, profile: &SampleProfile, truth: Option<&Distribution>) -> Result<Distribution>;
}

/// Additive constant `β(t)` of an add-β estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaFn {
    /// β ≡ 1.
    Laplace,
    /// β ≡ 1/2.
    KrichevskyTrofimov,
    /// β(0) = 1/2, β(1) = 1, β(t) = 3/4 for t > 1.
    BraessSauer,
    Constant(f64),
    /// `values[t]` for `t < values.len()`, `tail` beyond.
    Table { values: Vec<f64>, tail: f64 },
}

impl BetaFn {
    pub fn beta(&self, t: u64) -> f64 {
        match self {
            BetaFn::Laplace => 1.0,
            BetaFn::KrichevskyTrofimov => 0.5,
            BetaFn::BraessSauer => match t {
                0 => 0.5,
                1 => 1.0,
                _ => 0.75,
            },
            BetaFn::Constant(b) => *b,
            BetaFn::Table { values, tail } => values.get(t as usize).copied().unwrap_or(*tail),
        }
    }
}

/// Builds a distribution from one value per count class.
fn broadcast(profile: &SampleProfile, class_prob: &BTreeMap<u64, f64>) -> Distribution {
    let probs = profile.counts().iter().map(|c| class_prob[c]).collect();
    Distribution::from_probs_unchecked(probs)
}

/// Normalizes unnormalized per-class masses `u_t` by `N = Σ_t Φ_t u_t`.
fn normalize_classes(profile: &SampleProfile, unnormalized: BTreeMap<u64, f64>) -> Distribution {
    let total: f64 = unnormalized.iter().map(|(t, u)| profile.prevalence(*t) as f64 * u).sum();
    let probs = unnormalized.into_iter().map(|(t, u)| (t, u / total)).collect();
    broadcast(profile, &probs)
}

fn realized_classes(profile: &SampleProfile) -> impl Iterator<Item = (u64, u64)> + '_ {
    profile.prevalences().filter(|&(_, phi)| phi > 0)
}

fn require_samples(profile: &SampleProfile, what: &str) -> Result<()> {
    if profile.n() == 0 {
        return Err(Error::undefined(format!("{what} needs at least one sample")));
    }
    Ok(())
}

fn require_truth<'a>(truth: Option<&'a Distribution>, profile: &SampleProfile, what: &str) -> Result<&'a Distribution> {
    let p = truth.ok_or_else(|| Error::invalid(format!("{what} needs the true distribution")))?;
    if p.k() != profile.k() {
        return Err(Error::invalid(format!(
            "true distribution has k = {}, profile has k = {}",
            p.k(),
            profile.k()
        )));
    }
    Ok(p)
}

/// `q(x) = n(x)/n`. Unseen symbols get 0.
pub fn empirical(profile: &SampleProfile) -> Result<Distribution> {
    require_samples(profile, "empirical estimator")?;
    let n = profile.n() as f64;
    let probs = realized_classes(profile).map(|(t, _)| (t, t as f64 / n)).collect();
    Ok(broadcast(profile, &probs))
}

/// `q(x) ∝ n(x) + β(n(x))`.
pub fn add_beta(profile: &SampleProfile, beta: &BetaFn) -> Result<Distribution> {
    let mut masses = BTreeMap::new();
    for (t, _) in realized_classes(profile) {
        let b = beta.beta(t);
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("beta({t}) = {b} must be positive")));
        }
        masses.insert(t, t as f64 + b);
    }
    Ok(normalize_classes(profile, masses))
}

/// Good-Turing / empirical combination: a symbol seen `t` times gets
/// unnormalized mass `t` when `t > Φ_{t+1}` and
/// `max(Φ_{t+1}, 1)/Φ_t · (t + 1)` otherwise.
///
/// The comparison is strict, so ties take the Good-Turing branch. `Φ_{n+1}`
/// is 0, so the most frequent symbol is always empirical. Unseen symbols
/// (`t = 0`) always take the Good-Turing branch. No flooring is applied.
pub fn competitive_gt(profile: &SampleProfile) -> Result<Distribution> {
    require_samples(profile, "competitive estimator")?;
    let masses = realized_classes(profile)
        .map(|(t, phi_t)| {
            let phi_next = profile.prevalence(t + 1);
            let u = if t > phi_next {
                t as f64
            } else {
                phi_next.max(1) as f64 / phi_t as f64 * (t + 1) as f64
            };
            (t, u)
        })
        .collect();
    Ok(normalize_classes(profile, masses))
}

/// `q*(x) = S_{n(x)} / Φ_{n(x)}`: the natural estimator with least KL loss
/// for this sample, given the true `p`.
pub fn best_natural(p: &Distribution, profile: &SampleProfile) -> Result<Distribution> {
    let s = combined_mass(p, profile)?;
    let probs = realized_classes(profile).map(|(t, phi)| (t, s.get(t) / phi as f64)).collect();
    Ok(broadcast(profile, &probs))
}

/// Advances `perm` to the next lexicographic permutation; false after the
/// last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&v| v > perm[i]).expect("pivot has a successor");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Permutation-averaged oracle:
///
/// `q(y) = Σ_σ p(σ(x^n)) p(σ(y)) / Σ_σ p(σ(x^n))`
///
/// over all `k!` relabelings σ. It depends on `p` only through its multiset
/// of values. Only multiplicities matter, so the profile suffices; weights
/// are accumulated in log space.
pub fn permutation_oracle_profile(p: &Distribution, profile: &SampleProfile) -> Result<Distribution> {
    let k = profile.k();
    if k > PERMUTATION_ORACLE_MAX_K {
        return Err(Error::Capacity(format!(
            "permutation oracle supports k <= {PERMUTATION_ORACLE_MAX_K}, got {k}"
        )));
    }
    let p = require_truth(Some(p), profile, "permutation oracle")?;
    let ln_p: Vec<f64> = p.probs().iter().map(|v| v.ln()).collect();
    let counts = profile.counts();

    let mut perms = Vec::new();
    let mut log_weights = Vec::new();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let lw: f64 = counts
            .iter()
            .zip(&perm)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &s)| c as f64 * ln_p[s])
            .sum();
        perms.push(perm.clone());
        log_weights.push(lw);
        if !next_permutation(&mut perm) {
            break;
        }
    }

    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::undefined("sample has zero probability under every relabeling of p"));
    }
    let weights: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let denom: f64 = weights.iter().sum();

    // One representative per class keeps equal-count symbols bit-identical.
    let mut class_prob = BTreeMap::new();
    for (y, &c) in counts.iter().enumerate() {
        class_prob.entry(c).or_insert_with(|| {
            let num: f64 = perms.iter().zip(&weights).map(|(s, w)| w * p.probs()[s[y]]).sum();
            num / denom
        });
    }
    Ok(broadcast(profile, &class_prob))
}

pub fn permutation_oracle(p: &Distribution, sample: &Sample) -> Result<Distribution> {
    permutation_oracle_profile(p, &SampleProfile::from_sample(sample))
}

/// Named estimator selection.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Empirical,
    AddBeta(BetaFn),
    CompetitiveGt,
    BestNatural,
    PermutationOracle,
}

impl EstimatorSpec {
    /// Accepts `empirical`, `laplace`, `kt`, `braess-sauer`, `competitive`,
    /// `best-natural`, `perm-oracle` and `add-beta:<const>`.
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "empirical" => EstimatorSpec::Empirical,
            "laplace" => EstimatorSpec::AddBeta(BetaFn::Laplace),
            "kt" => EstimatorSpec::AddBeta(BetaFn::KrichevskyTrofimov),
            "braess-sauer" => EstimatorSpec::AddBeta(BetaFn::BraessSauer),
            "competitive" => EstimatorSpec::CompetitiveGt,
            "best-natural" => EstimatorSpec::BestNatural,
            "perm-oracle" => EstimatorSpec::PermutationOracle,
            _ => match s.strip_prefix("add-beta:").map(str::parse::<f64>) {
                Some(Ok(b)) if b > 0.0 && b.is_finite() => EstimatorSpec::AddBeta(BetaFn::Constant(b)),
                _ => return Err(Error::UnknownName { kind: "estimator", name: s.to_string() }),
            },
        })
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSpec::Empirical => f.write_str("empirical"),
            EstimatorSpec::AddBeta(BetaFn::Laplace) => f.write_str("laplace"),
            EstimatorSpec::AddBeta(BetaFn::KrichevskyTrofimov) => f.write_str("kt"),
            EstimatorSpec::AddBeta(BetaFn::BraessSauer) => f.write_str("braess-sauer"),
            EstimatorSpec::AddBeta(BetaFn::Constant(b)) => write!(f, "add-beta:{b}"),
            EstimatorSpec::AddBeta(BetaFn::Table { .. }) => f.write_str("add-beta:table"),
            EstimatorSpec::CompetitiveGt => f.write_str("competitive"),
            EstimatorSpec::BestNatural => f.write_str("best-natural"),
            EstimatorSpec::PermutationOracle => f.write_str("perm-oracle"),
        }
    }
}

impl Estimator for EstimatorSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn requires_true_p(&self) -> bool {
        matches!(self, EstimatorSpec::BestNatural | EstimatorSpec::PermutationOracle)
    }

    fn estimate(&self, profile: &SampleProfile, truth: Option<&Distribution>) -> Result<Distribution> {
        match self {
            EstimatorSpec::Empirical => empirical(profile),
            EstimatorSpec::AddBeta(beta) => add_beta(profile, beta),
            EstimatorSpec::CompetitiveGt => competitive_gt(profile),
            EstimatorSpec::BestNatural => best_natural(require_truth(truth, profile, "best-natural")?, profile),
            EstimatorSpec::PermutationOracle => {
                permutation_oracle_profile(require_truth(truth, profile, "perm-oracle")?, profile)
            }
        }
    }
}

impl<E: Estimator + ?Sized> Estimator for &E {
    fn name(&self) -> String {
        (**self).name()
    }

    fn requires_true_p(&self) -> bool {
        (**self).requires_true_p()
    }

    fn estimate(&self, profile: &SampleProfile, truth: Option<&Distribution>) -> Result<Distribution> {
        (**self).estimate(profile, truth)
    }
}
