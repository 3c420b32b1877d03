//! Seeded batches over independent samples.
//!
//! Sample `i` of a run with seed `s` draws from `stream_rng(s, i)`, so results
//! do not depend on the evaluation order and the sequential and parallel
//! strategies produce identical output. Without the `parallel` feature,
//! [`Strategy::Parallel`] runs sequentially.

use serde::Serialize;

use crate::crossratio::{entry_identity_check, lemma32_residuals};
use crate::error::Error;
use crate::spn1::{random_element_with, stream_rng, SamplerConfig, SpElement, ADMISSION_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

/// `f(0), ..., f(count - 1)` in index order.
pub fn run<T, F>(count: usize, strategy: Strategy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            (0..count as u64).into_par_iter().map(f).collect()
        }
        _ => (0..count as u64).map(f).collect(),
    }
}

/// Word length of sample `index` when cycling through `1..=max`.
pub fn word_length(index: u64, max: usize) -> usize {
    1 + (index as usize) % max.max(1)
}

/// Sample `index` of the seeded family: a word of length
/// `word_length(index, max_word_length)` on `stream_rng(seed, index)`.
pub fn sample(
    n: usize,
    seed: u64,
    index: u64,
    max_word_length: usize,
    cfg: &SamplerConfig,
) -> crate::Result<SpElement> {
    let mut rng = stream_rng(seed, index);
    random_element_with(n, cfg, &mut rng, word_length(index, max_word_length))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n: usize,
    pub seed: u64,
    pub count: usize,
    pub max_word_length: usize,
    pub tol: f64,
    pub sampler: SamplerConfig,
}

impl VerifyConfig {
    pub fn new(n: usize, seed: u64, count: usize) -> Self {
        Self {
            n,
            seed,
            count,
            max_word_length: 16,
            tol: ADMISSION_TOL,
            sampler: SamplerConfig::default(),
        }
    }
}

/// Residuals of one sample. A sample that failed admission carries its
/// membership residual and NaN elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleResidual {
    pub index: u64,
    pub word_length: usize,
    pub admitted: bool,
    /// Membership first, then the twelve block identities.
    pub identities: [f64; 13],
    pub lemma_slacks: [f64; 5],
    /// Relative errors of the two corner-entry identities.
    pub entry_errors: [f64; 2],
}

impl SampleResidual {
    pub fn max_identity(&self) -> f64 {
        self.identities.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_slack(&self) -> f64 {
        self.lemma_slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry_error(&self) -> f64 {
        self.entry_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.admitted
            && self.max_identity() <= tol
            && self.min_slack() >= -tol
            && self.max_entry_error() <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub max_identity: f64,
    pub min_slack: f64,
    pub max_entry_error: f64,
    pub failures: usize,
    pub rows: Vec<SampleResidual>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn verify_sample(cfg: &VerifyConfig, index: u64) -> SampleResidual {
    let wl = word_length(index, cfg.max_word_length);
    match sample(cfg.n, cfg.seed, index, cfg.max_word_length, &cfg.sampler) {
        Ok(h) => {
            let e = entry_identity_check(&h);
            SampleResidual {
                index,
                word_length: wl,
                admitted: true,
                identities: h.identity_residuals(),
                lemma_slacks: lemma32_residuals(&h),
                entry_errors: e.relative_errors(),
            }
        }
        Err(err) => {
            let residual = match err {
                Error::NotMember { residual, .. } => residual,
                _ => f64::NAN,
            };
            let mut identities = [f64::NAN; 13];
            identities[0] = residual;
            SampleResidual {
                index,
                word_length: wl,
                admitted: false,
                identities,
                lemma_slacks: [f64::NAN; 5],
                entry_errors: [f64::NAN; 2],
            }
        }
    }
}

pub fn verify(cfg: &VerifyConfig, strategy: Strategy) -> VerifyReport {
    let rows = run(cfg.count, strategy, |i| verify_sample(cfg, i));
    let admitted = || rows.iter().filter(|r| r.admitted);
    VerifyReport {
        n: cfg.n,
        seed: cfg.seed,
        count: cfg.count,
        tol: cfg.tol,
        max_identity: admitted().map(|r| r.max_identity()).fold(0.0, f64::max),
        min_slack: admitted().map(|r| r.min_slack()).fold(f64::INFINITY, f64::min),
        max_entry_error: admitted().map(|r| r.max_entry_error()).fold(0.0, f64::max),
        failures: rows.iter().filter(|r| !r.passes(cfg.tol)).count(),
        rows,
    }
}
