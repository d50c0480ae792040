//! Lazy-ComBand: exponential weights over an enumerated action set.

use std::sync::Arc;

use super::{check_precondition, validate_params, LazyLearner, LearnerParams, MetaClock};
use crate::action::{ActionVector, Policy};
use crate::domains::ActionSet;
use crate::error::Result;
use crate::linalg::{co_occurrence, min_nonzero_eigenvalue, DEFAULT_RANK_TOL};
use crate::spanner::{exploration_policy, Spanner};

/// Largest action set ComBand will enumerate.
pub const ENUMERATION_CAP: usize = 200_000;

#[derive(Debug, Clone)]
pub struct CombandShared {
    pub actions: Vec<ActionVector>,
    pub mu: Policy,
    /// Smallest nonzero eigenvalue of the exploration co-occurrence matrix.
    pub lambda_min: f64,
    pub weight: usize,
}

impl CombandShared {
    pub fn new(set: &ActionSet, spanner: &Spanner) -> Result<Self> {
        let actions = set.enumerate(ENUMERATION_CAP)?;
        let mu = exploration_policy(spanner);
        let lambda_min = min_nonzero_eigenvalue(&co_occurrence(&mu)?, DEFAULT_RANK_TOL);
        Ok(CombandShared {
            actions,
            mu,
            lambda_min,
            weight: set.weight(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComBand {
    shared: Arc<CombandShared>,
    params: LearnerParams,
    log_w: Vec<f64>,
    policy: Policy,
    clock: MetaClock,
    version: u64,
}

/// Normalized exponential weights, computed stably.
pub(crate) fn softmax(log_w: &[f64]) -> Vec<f64> {
    let mx = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - mx).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

impl ComBand {
    pub fn new(shared: Arc<CombandShared>, params: LearnerParams) -> Result<Self> {
        validate_params(&params)?;
        let d = shared.mu.dim().unwrap_or(0);
        let mut s = ComBand {
            log_w: vec![0.0; shared.actions.len()],
            policy: Policy::new(),
            clock: MetaClock::new(d),
            shared,
            params,
            version: 0,
        };
        s.rebuild();
        Ok(s)
    }

    /// The exponential-weights distribution before exploration is mixed in.
    pub fn weights(&self) -> Vec<f64> {
        softmax(&self.log_w)
    }

    fn rebuild(&mut self) {
        let p = Policy::from_atoms(self.shared.actions.iter().cloned().zip(self.weights()))
            .expect("softmax weights are probabilities");
        self.policy = p.mix(&self.shared.mu, self.params.gamma);
    }

    fn meta_update(&mut self) -> Result<()> {
        let x = &self.clock.acc;
        let gains: Vec<f64> = self.shared.actions.iter().map(|a| a.dot(x)).collect();
        let magnitude = gains.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        check_precondition(self.params.eta, magnitude)?;
        if magnitude == 0.0 {
            return Ok(());
        }
        for (l, g) in self.log_w.iter_mut().zip(&gains) {
            *l += self.params.eta * g;
        }
        self.rebuild();
        self.version += 1;
        Ok(())
    }
}

impl LazyLearner for ComBand {
    fn policy(&self) -> &Policy {
        &self.policy
    }

    fn version(&self) -> u64 {
        self.version
    }

    fn meta_day(&self) -> u64 {
        self.clock.h
    }

    fn day_in_meta(&self) -> u64 {
        self.clock.tau
    }

    fn accumulated(&self) -> &[f64] {
        &self.clock.acc
    }

    fn params(&self) -> &LearnerParams {
        &self.params
    }

    fn ingest(&mut self, estimate: &[f64]) -> Result<()> {
        if self.clock.push(estimate, self.params.meta_len) {
            self.meta_update()?;
            self.clock.advance();
        }
        Ok(())
    }
}
