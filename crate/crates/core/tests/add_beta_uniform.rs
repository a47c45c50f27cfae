//! Closed-form check of add-β losses on a uniform distribution.
//!
//! Under `uniform(k)` each multiplicity is Binomial(n, 1/k) and a constant-β
//! estimate is `(t + β)/(n + kβ)`, so
//! `E[KL] = Σ_t P(t) ln((1/k)(n + kβ)/(t + β))`. This is evaluated here
//! without the library and compared with its Monte Carlo estimates. It also
//! pins down that at `k = 10000` the loss grows with `n` for small `n`.

use cde_core::distributions::uniform;
use cde_core::estimators::{BetaFn, EstimatorSpec};
use cde_core::simulation::monte_carlo_regret;

fn ln_binomial_pmf(t: u64, n: u64, p: f64) -> f64 {
    let ln_choose: f64 = (1..=t).map(|i| ((n - t + i) as f64).ln() - (i as f64).ln()).sum();
    ln_choose + t as f64 * p.ln() + (n - t) as f64 * (1.0 - p).ln()
}

fn closed_form(k: usize, n: u64, beta: f64) -> f64 {
    let p = 1.0 / k as f64;
    let norm = n as f64 + k as f64 * beta;
    (0..=n.min(500))
        .map(|t| ln_binomial_pmf(t, n, p).exp() * (p * norm / (t as f64 + beta)).ln())
        .sum()
}

#[test]
fn laplace_matches_closed_form() {
    let k = 10_000;
    let p = uniform(k).unwrap();
    let laplace = EstimatorSpec::AddBeta(BetaFn::Laplace);
    for (n, seed) in [(1000u64, 1u64), (6444, 2)] {
        let exact = closed_form(k, n, 1.0);
        let mc = monte_carlo_regret(&p, &laplace, n, 400, seed).unwrap();
        assert!((mc.mean_kl - exact).abs() <= 4.0 * mc.stderr, "n={n}: mc {} exact {exact}", mc.mean_kl);
    }
}

#[test]
fn add_beta_loss_on_uniform_is_not_monotone_in_n() {
    let k = 10_000;
    for beta in [1.0, 0.5] {
        assert!(closed_form(k, 0, beta).abs() < 1e-15);
        let small = closed_form(k, 1000, beta);
        let mid = closed_form(k, 11_889, beta);
        let large = closed_form(k, 50_000, beta);
        assert!(small < mid && large < mid, "beta={beta}: {small} {mid} {large}");
    }
    assert!((closed_form(k, 1000, 1.0) - 0.027_404_678).abs() < 1e-6);
}
