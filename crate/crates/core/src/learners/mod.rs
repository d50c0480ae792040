//! Lazy instance learners driven by a master, plus two self-contained
//! external-regret baselines.

mod combcp;
mod comband;
mod combexp;
mod exp_weights;

pub use combcp::{ComBcp, CombcpShared};
pub use comband::{ComBand, CombandShared, ENUMERATION_CAP};
pub use combexp::{CombExpParams, CombExpReplica};
pub use exp_weights::ExpWeights;

use crate::action::Policy;
use crate::error::{Error, Result};

/// Whether the schedule follows the asymptotic constants or desk-scale ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Theory,
    Practical,
}

/// The parameters of one lazy learner instance at scale `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerParams {
    pub k: u32,
    pub gamma: f64,
    pub eta: f64,
    /// Days per meta-day, `H^(k-1)`.
    pub meta_len: u64,
}

/// Saturating `base^exp`.
pub fn pow_sat(base: u64, exp: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// A learner that freezes its policy for a meta-day, accumulates the
/// broadcast estimates, and updates at the meta-day boundary.
pub trait LazyLearner: Send {
    /// The frozen policy of the current meta-day.
    fn policy(&self) -> &Policy;
    /// Incremented whenever the policy changes.
    fn version(&self) -> u64;
    /// Current meta-day, starting at 1.
    fn meta_day(&self) -> u64;
    /// Days already ingested in the current meta-day.
    fn day_in_meta(&self) -> u64;
    /// The running sum of estimates for the current meta-day.
    fn accumulated(&self) -> &[f64];
    fn params(&self) -> &LearnerParams;
    /// Adds one day's estimate; runs the meta-update when the meta-day ends.
    fn ingest(&mut self, estimate: &[f64]) -> Result<()>;
}

/// Shared bookkeeping for the meta-day clock.
#[derive(Debug, Clone)]
pub(crate) struct MetaClock {
    pub acc: Vec<f64>,
    pub tau: u64,
    pub h: u64,
}

impl MetaClock {
    pub(crate) fn new(d: usize) -> Self {
        MetaClock { acc: vec![0.0; d], tau: 0, h: 1 }
    }

    /// Accumulates; returns true when the meta-day is complete.
    pub(crate) fn push(&mut self, estimate: &[f64], meta_len: u64) -> bool {
        for (a, e) in self.acc.iter_mut().zip(estimate) {
            *a += e;
        }
        self.tau += 1;
        self.tau >= meta_len
    }

    pub(crate) fn advance(&mut self) {
        self.acc.iter_mut().for_each(|a| *a = 0.0);
        self.tau = 0;
        self.h += 1;
    }
}

pub(crate) fn check_precondition(eta: f64, magnitude: f64) -> Result<()> {
    let value = eta * magnitude;
    if !(value <= 1.0 + 1e-12) {
        return Err(Error::OmdPreconditionViolated { value, eta });
    }
    Ok(())
}

pub(crate) fn validate_params(p: &LearnerParams) -> Result<()> {
    if !(p.gamma > 0.0 && p.gamma <= 1.0) {
        return Err(Error::invalid(format!("exploration rate must lie in (0, 1], got {}", p.gamma)));
    }
    if !(p.eta > 0.0 && p.eta.is_finite()) {
        return Err(Error::invalid(format!("learning rate must be positive, got {}", p.eta)));
    }
    if p.meta_len == 0 {
        return Err(Error::invalid("meta-day length must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
