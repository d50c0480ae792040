//! A faithful replica of CombEXP: mirror descent on `q ∈ P`, mixed with the
//! coordinate marginals `μ⁰` of the uniform distribution over actions and
//! played through a decomposition of the mixture.

use std::sync::Arc;

use rand::Rng;

use crate::action::{ActionVector, Policy};
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::geometry::{decompose, kl_project};
use crate::learners::ENUMERATION_CAP;
use crate::linalg::{co_occurrence, min_nonzero_eigenvalue, orthonormal_basis, DEFAULT_RANK_TOL};
use crate::master::{Bandit, DayOutcome};
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombExpParams {
    pub gamma: f64,
    pub eta: f64,
}

#[derive(Debug, Clone)]
pub struct CombExpReplica {
    set: Arc<ActionSet>,
    params: CombExpParams,
    mu0: Vec<f64>,
    q: Vec<f64>,
    policy: Option<Policy>,
    estimator: Estimator,
    t: u64,
}

/// `μ⁰`, `μ_min` and `λ` of the uniform distribution over the actions.
pub(crate) fn uniform_statistics(set: &ActionSet) -> Result<(Vec<f64>, f64, f64, Vec<ActionVector>)> {
    let all = set.enumerate(ENUMERATION_CAP)?;
    let m = set.weight() as f64;
    let uniform = Policy::uniform(all.iter().cloned());
    let mu0: Vec<f64> = uniform.mean().into_iter().map(|v| v / m).collect();
    let mu_min = mu0.iter().map(|v| m * v).fold(f64::INFINITY, f64::min);
    let lambda = min_nonzero_eigenvalue(&co_occurrence(&uniform)?, DEFAULT_RANK_TOL);
    Ok((mu0, mu_min, lambda, all))
}

impl CombExpParams {
    /// The tuning from the algorithm's analysis for horizon `t`.
    pub fn tuned(d: usize, m: usize, mu_min: f64, lambda: f64, t: u64) -> Self {
        let (d, m, t) = (d as f64, m as f64, t.max(1) as f64);
        let c = lambda / m.powf(1.5);
        let a = (m * (1.0 / mu_min).ln()).sqrt();
        let b = (c * (c * m * m * d + m) * t).sqrt();
        let gamma = a / (a + b);
        CombExpParams { gamma, eta: gamma * c }
    }
}

impl CombExpReplica {
    /// A replica tuned for `horizon` days.
    pub fn new(set: Arc<ActionSet>, horizon: u64) -> Result<Self> {
        let (_, mu_min, lambda, _) = uniform_statistics(&set)?;
        let params = CombExpParams::tuned(set.dim(), set.weight(), mu_min, lambda, horizon);
        Self::with_params(set, params)
    }

    pub fn with_params(set: Arc<ActionSet>, params: CombExpParams) -> Result<Self> {
        if !(params.gamma > 0.0 && params.gamma <= 1.0 && params.eta > 0.0) {
            return Err(Error::invalid("CombEXP needs gamma in (0, 1] and eta > 0"));
        }
        let (mu0, _, _, all) = uniform_statistics(&set)?;
        let vecs: Vec<Vec<f64>> = all.iter().map(|a| a.to_f64()).collect();
        let estimator = Estimator::new(set.dim(), orthonormal_basis(&vecs, 1e-9));
        Ok(CombExpReplica {
            q: mu0.clone(),
            mu0,
            set,
            params,
            policy: None,
            estimator,
            t: 0,
        })
    }

    pub fn params(&self) -> CombExpParams {
        self.params
    }

    pub fn mu0(&self) -> &[f64] {
        &self.mu0
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    fn ensure_policy(&mut self) -> Result<()> {
        if self.policy.is_none() {
            let g = self.params.gamma;
            let mixed: Vec<f64> = self.q.iter().zip(&self.mu0).map(|(q, u)| (1.0 - g) * q + g * u).collect();
            self.policy = Some(decompose(&self.set, &mixed)?);
        }
        Ok(())
    }

    fn update(&mut self, estimate: &[f64]) -> Result<()> {
        let mass: f64 = self.q.iter().sum();
        let mut raw: Vec<f64> = self
            .q
            .iter()
            .zip(estimate)
            .map(|(q, r)| q * (self.params.eta * r).exp())
            .collect();
        let s: f64 = raw.iter().sum();
        raw.iter_mut().for_each(|v| *v *= mass / s);
        self.q = kl_project(&self.set, &raw)?;
        self.policy = None;
        Ok(())
    }
}

impl Bandit for CombExpReplica {
    fn day(&self) -> u64 {
        self.t
    }

    fn current_policy(&mut self) -> Result<&Policy> {
        self.ensure_policy()?;
        Ok(self.policy.as_ref().expect("policy computed"))
    }

    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome> {
        self.t += 1;
        self.ensure_policy()?;
        let policy = self.policy.clone().expect("policy computed");
        let idx = policy.pick(rng.gen::<f64>());
        let action = policy.atoms()[idx].0.clone();
        let reward = reveal(&action);
        // A zero reward gives a zero estimate and the update is skipped.
        if reward != 0.0 {
            let est = self.estimator.prepare(&policy)?.estimate(&action, reward);
            self.update(&est)?;
        }
        Ok(DayOutcome { policy, action, reward })
    }
}
