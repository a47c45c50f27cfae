//! Losses in nats. `0·ln(0/·) = 0`; a positive `p(x)` against a zero
//! `q(x)` gives `+∞`, which is returned as-is and never clamped.

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::profile::CombinedMass;

#[inline]
fn kl_term(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln()
    }
}

#[inline]
fn cross_term(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        -a * b.ln()
    }
}

fn check_len(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.k() != q.k() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", p.k(), q.k())));
    }
    Ok(())
}

/// `D(p‖q) = Σ p(x) ln(p(x)/q(x))`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.probs().iter().zip(q.probs()).map(|(&a, &b)| kl_term(a, b)).sum())
}

/// `H(p) = −Σ p(x) ln p(x)`.
pub fn entropy(p: &Distribution) -> f64 {
    p.probs().iter().map(|&a| cross_term(a, a)).sum()
}

/// `Σ p(x) ln(1/q(x))`.
pub fn cross_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.probs().iter().zip(q.probs()).map(|(&a, &b)| cross_term(a, b)).sum())
}

/// `Σ_t S_t ln(S_t/Ŝ_t)` over the support of `s`; a missing `Ŝ_t` counts as 0.
pub fn combined_kl(s: &CombinedMass, s_hat: &CombinedMass) -> f64 {
    s.iter().map(|(t, st)| kl_term(st, s_hat.get(t))).sum()
}
