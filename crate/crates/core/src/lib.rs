//! Competitive estimation of discrete distributions under KL loss.
//!
//! The crate compares data-driven estimators (empirical, the add-β family,
//! and a Good-Turing/empirical combination) against two oracles that know
//! the true distribution: the best *natural* estimator, which must give
//! equal probability to symbols seen equally often, and the
//! permutation-averaged estimator, which knows the distribution only up to
//! relabeling.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`distributions`] | experiment distributions, Dirichlet draws, seeded sampling |
//! | [`profile`] | multiplicities n(x), prevalences Φ_t, combined masses S_t |
//! | [`divergence`] | KL divergence, entropy, cross entropy, combined-mass KL |
//! | [`estimators`] | every estimator plus the [`Estimator`] trait |
//! | [`oracle`] | exact expected KL by enumerating count vectors |
//! | [`simulation`] | seeded, paired Monte Carlo regret over an experiment grid |
//! | [`report`] | CSV / JSON serialization of [`RegretRecord`]s |
//!
//! All logarithms are natural; every loss is in nats.
//!
//! ```
//! use cde_core::{distributions, estimators::EstimatorSpec, oracle};
//!
//! let p = distributions::Distribution::new(vec![0.5, 0.5]).unwrap();
//! let laplace = EstimatorSpec::parse("laplace").unwrap();
//! let exact = oracle::exact_expected_kl(&p, &laplace, 1).unwrap();
//! assert!((exact.expected_kl - 0.5 * (9.0f64 / 8.0).ln()).abs() < 1e-15);
//! ```

pub mod distributions;
pub mod divergence;
mod error;
pub mod estimators;
pub mod exec;
pub mod oracle;
pub mod profile;
pub mod report;
pub mod simulation;

pub use distributions::{Distribution, RngSeed, Sample};
pub use error::{Error, Result};
pub use estimators::{Estimator, EstimatorSpec};
pub use exec::Execution;
pub use profile::{CombinedMass, SampleProfile};
pub use simulation::{ExperimentConfig, RegretRecord};
